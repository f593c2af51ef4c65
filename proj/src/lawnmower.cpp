#include "urbancover/lawnmower.hpp"

#include <cmath>

namespace urbancover {

SweepPlan boustrophedon(double L1, double L2, double lane_spacing, double sensor_radius,
                        double speed, double altitude) {
  if (L1 <= 0.0 || L2 <= 0.0) throw std::invalid_argument("boustrophedon: extent must be positive");
  if (lane_spacing <= 0.0 || lane_spacing > 2.0 * sensor_radius)
    throw std::invalid_argument("boustrophedon: need 0 < lane_spacing <= 2*sensor_radius");
  if (lane_spacing > std::fmin(L1, L2))
    throw std::invalid_argument("boustrophedon: lane_spacing exceeds the extent");
  if (speed <= 0.0) throw std::invalid_argument("boustrophedon: speed must be positive");

  // Lanes run along the long axis; work in a frame where that axis is x and
  // swap back at the end.
  const bool swapped = L2 > L1;
  const double len = swapped ? L2 : L1;   // along-lane
  const double span = swapped ? L1 : L2;  // across lanes

  const auto lane_count = static_cast<std::size_t>(std::ceil(span / lane_spacing - 1e-12));
  const double spacing = span / static_cast<double>(lane_count);

  std::vector<Vec2> pts;
  pts.reserve(2 * lane_count + 4);
  for (std::size_t k = 0; k < lane_count; ++k) {
    const double y = (static_cast<double>(k) + 0.5) * spacing;
    if (k % 2 == 0) {
      pts.push_back({0.0, y});
      pts.push_back({len, y});
    } else {
      pts.push_back({len, y});
      pts.push_back({0.0, y});
    }
  }
  // Close the cycle along the boundary back to the first lane.
  const Vec2 end = pts.back();
  const Vec2 start = pts.front();
  if (end.x == 0.0) {
    pts.push_back({0.0, start.y});
  } else {
    pts.push_back({len, 0.0});
    pts.push_back({0.0, 0.0});
    pts.push_back({0.0, start.y});
  }

  auto unswap = [&](const Vec2& p) { return swapped ? Vec2{p.y, p.x} : p; };

  SweepPlan plan;
  plan.lane_spacing = spacing;
  for (std::size_t k = 0; k < lane_count; ++k)
    plan.lanes.emplace_back(unswap(pts[2 * k]), unswap(pts[2 * k + 1]));

  plan.cycle.cyclic = true;
  double t = 0.0;
  Vec2 prev = unswap(pts.front());
  for (const auto& raw : pts) {
    const Vec2 p = unswap(raw);
    const double d = p.dist(prev);
    if (!plan.cycle.samples.empty() && d < 1e-12) continue;
    t += d / speed;
    plan.cycle.samples.push_back({t, {p.x, p.y, altitude}, true});
    prev = p;
  }
  return plan;
}

MultiPath multi_lawnmower(const Environment& env, std::size_t n, double lane_spacing, double speed,
                          double clearance) {
  if (n < 1) throw std::invalid_argument("multi_lawnmower: need at least one agent");
  SweepPlan plan = boustrophedon(env.L1, env.L2, lane_spacing, env.sensor_radius, speed,
                                 env.optimal_altitude);
  const Trajectory repaired = fly_over_buildings(plan.cycle, env, speed, clearance);
  const double cycle_len = repaired.length3d();

  MultiPath mp;
  mp.trajectories.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Trajectory rotated =
        rotate_cycle(repaired, cycle_len * static_cast<double>(i) / static_cast<double>(n));
    rotated.agent_id = static_cast<int>(i - 1);
    refresh_observing_flags(rotated, env.optimal_altitude);
    mp.trajectories.push_back(std::move(rotated));
  }
  return mp;
}

}  // namespace urbancover
