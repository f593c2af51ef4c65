#pragma once

#include "urbancover/environment.hpp"
#include "urbancover/trajectory.hpp"

namespace urbancover {

/// Boustrophedon sweep of the obstacle-free footprint, closed into a cycle.
struct SweepPlan {
  double lane_spacing = 0.0;  ///< effective spacing actually used (<= requested)
  std::vector<std::pair<Vec2, Vec2>> lanes;
  Trajectory cycle;  ///< closed, constant speed, flown at the sweep altitude
};

/// Back-and-forth lanes parallel to the long axis, spaced so that every point
/// of the extent lies within `sensor_radius` of the cycle, closed by a return
/// leg along the boundary. Requires 0 < lane_spacing <= 2*sensor_radius and
/// lane_spacing <= min(L1, L2).
SweepPlan boustrophedon(double L1, double L2, double lane_spacing, double sensor_radius,
                        double speed, double altitude);

/// Algorithm: sweep the vacant footprint, repair the cycle over buildings,
/// then hand agent i the cycle rotated by (i/n) of its repaired length.
MultiPath multi_lawnmower(const Environment& env, std::size_t n, double lane_spacing, double speed,
                          double clearance = 1.0);

}  // namespace urbancover
