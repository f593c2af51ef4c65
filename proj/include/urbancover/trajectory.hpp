#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/geometry.hpp"

namespace urbancover {

struct TrajSample {
  double t = 0.0;
  Vec3 p;
  bool observing = false;
};

/// Time-stamped waypoint polyline for one agent. Positions between samples
/// are linear interpolations; a cyclic trajectory wraps around its period.
struct Trajectory {
  int agent_id = 0;
  bool cyclic = false;
  std::vector<TrajSample> samples;

  bool empty() const { return samples.empty(); }
  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
  double length3d() const;

  /// Position at time t. Before the start clamps to the first sample; past
  /// the end holds the last sample (or wraps when cyclic).
  Vec3 position_at(double t) const;

  /// Point at the given 3D arc length from the start (clamped to [0, length]).
  Vec3 point_at_arc_length(double s) const;
};

struct MultiPath {
  std::vector<Trajectory> trajectories;
};

/// Discretized swept region (psi-tilde ⊕ B intersected with the free space).
struct SweptRegion {
  GroundGrid grid;
  std::vector<std::uint8_t> marked;  ///< 1 = covered free cell

  std::size_t marked_count() const;
  double area() const;
};

/// Samples with the camera functional (h at the optimal altitude), order and
/// timestamps preserved.
Trajectory observing_subset(const Trajectory& path);

/// Marks every free cell whose center lies within sensor_radius of the
/// ground projection of some observing sample.
SweptRegion swept_area(const MultiPath& mp, const Environment& env, double cell_size);

/// Fraction of free cells marked, in [0, 1].
double coverage_fraction(const SweptRegion& region, const Environment& env);

/// Replaces building-crossing spans of a constant-altitude route with
/// climb / traverse / descend segments flown at `speed`. Climbs are vertical
/// columns nudged just outside the footprint; sensing is off while elevated.
/// Only buildings at least as tall as the sweep altitude trigger a repair.
Trajectory fly_over_buildings(const Trajectory& path, const Environment& env, double speed,
                              double clearance = 1.0);

/// Re-parameterizes a closed trajectory to start `offset` meters of 3D arc
/// length along the cycle. Timestamps restart at 0 with the cycle's mean speed.
Trajectory rotate_cycle(const Trajectory& cycle, double offset);

/// Joins b after a; b's first position must coincide with a's last (1e-9).
Trajectory concat(const Trajectory& a, const Trajectory& b);

/// Sets observing = (h equals the optimal altitude within 1e-9) on all samples.
void refresh_observing_flags(Trajectory& path, double optimal_altitude);

/// CSV export: header `t,x,y,h,observing`, floats at 6 decimals.
void save_trajectory_csv(const Trajectory& path, const std::string& file);
Trajectory load_trajectory_csv(const std::string& file);

}  // namespace urbancover
