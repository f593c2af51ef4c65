#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "urbancover/lawnmower.hpp"

using namespace urbancover;

namespace {

Environment box_world(double L1, double L2, std::vector<Building> buildings,
                      double altitude = 5.0, double radius = 1.0) {
  Environment env;
  env.L1 = L1;
  env.L2 = L2;
  env.buildings = std::move(buildings);
  env.optimal_altitude = altitude;
  env.sensor_radius = radius;
  env.max_altitude = std::max(altitude, env.max_building_height()) + 1.0;
  return env;
}

// One full cycle as a multipath for swept-area checks.
MultiPath as_multipath(const Trajectory& cycle) {
  MultiPath mp;
  mp.trajectories.push_back(cycle);
  return mp;
}

}  // namespace

TEST_CASE("10x10 with spacing 2 yields 5 lanes and full coverage") {
  const Environment env = box_world(10, 10, {});
  const SweepPlan plan = boustrophedon(10, 10, 2.0, 1.0, 1.0, env.optimal_altitude);
  CHECK(plan.lanes.size() == 5);
  CHECK(plan.lane_spacing == doctest::Approx(2.0));
  CHECK(plan.cycle.cyclic);
  CHECK(plan.cycle.samples.front().p.dist(plan.cycle.samples.back().p) <= 1e-12);

  // Sample the cycle densely so the disc stamps overlap along lanes.
  Trajectory dense;
  dense.cyclic = true;
  const double len = plan.cycle.length3d();
  for (double s = 0.0; s <= len; s += 0.05) {
    const Vec3 p = plan.cycle.point_at_arc_length(s);
    dense.samples.push_back({s, p, true});
  }
  const SweptRegion region = swept_area(as_multipath(dense), env, 0.1);
  CHECK(coverage_fraction(region, env) == doctest::Approx(1.0));
}

TEST_CASE("single-lane extent still covers everything") {
  const Environment env = box_world(2, 2, {});
  const SweepPlan plan = boustrophedon(2, 2, 2.0, 1.0, 1.0, env.optimal_altitude);
  CHECK(plan.lanes.size() == 1);
  Trajectory dense;
  const double len = plan.cycle.length3d();
  for (double s = 0.0; s <= len; s += 0.02)
    dense.samples.push_back({s, plan.cycle.point_at_arc_length(s), true});
  const SweptRegion region = swept_area(as_multipath(dense), env, 0.05);
  CHECK(coverage_fraction(region, env) == doctest::Approx(1.0));
}

TEST_CASE("spacing wider than the footprint diameter is rejected") {
  CHECK_THROWS_AS(boustrophedon(10, 10, 2.5, 1.0, 1.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(boustrophedon(10, 10, 0.0, 1.0, 1.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(boustrophedon(1.0, 1.0, 2.0, 1.5, 1.0, 5.0), std::invalid_argument);
}

TEST_CASE("lanes run along the long axis") {
  const SweepPlan wide = boustrophedon(20, 10, 2.0, 1.0, 1.0, 5.0);
  for (const auto& lane : wide.lanes) CHECK(lane.first.y == doctest::Approx(lane.second.y));
  const SweepPlan tall = boustrophedon(10, 20, 2.0, 1.0, 1.0, 5.0);
  for (const auto& lane : tall.lanes) CHECK(lane.first.x == doctest::Approx(lane.second.x));
}

TEST_CASE("non-divisible spacing shrinks to keep the coverage guarantee") {
  const SweepPlan plan = boustrophedon(10, 10, 3.0, 1.5, 1.0, 5.0);
  CHECK(plan.lanes.size() == 4);
  CHECK(plan.lane_spacing == doctest::Approx(2.5));
  // Every boundary point within a footprint radius of some lane.
  CHECK(plan.lanes.front().first.y == doctest::Approx(1.25));
  CHECK(plan.lanes.back().first.y == doctest::Approx(8.75));
}

TEST_CASE("one agent gets the repaired cycle with zero offset") {
  const Environment env = box_world(10, 10, {});
  const MultiPath mp = multi_lawnmower(env, 1, 2.0, 1.0);
  REQUIRE(mp.trajectories.size() == 1);
  CHECK(mp.trajectories[0].cyclic);
  // Offset l for i = n wraps to the cycle start.
  const SweepPlan plan = boustrophedon(10, 10, 2.0, 1.0, 1.0, env.optimal_altitude);
  CHECK(mp.trajectories[0].samples.front().p.dist(plan.cycle.samples.front().p) <= 1e-9);
}

TEST_CASE("two agents stay antipodal along the cycle") {
  const Environment env = box_world(10, 10, {});
  const MultiPath mp = multi_lawnmower(env, 2, 2.0, 1.0);
  REQUIRE(mp.trajectories.size() == 2);
  const double len = mp.trajectories[0].length3d();
  const double period = len / 1.0;  // constant speed 1

  // A half-cycle arc offset is exactly a half-period time shift.
  for (double t = 0.0; t < 2.0 * period; t += period / 37.0) {
    const Vec3 a = mp.trajectories[0].position_at(t);
    const Vec3 b = mp.trajectories[1].position_at(t + period / 2.0);
    CHECK(a.dist(b) <= 1e-6 * len);
  }
}

TEST_CASE("repaired multi-agent cycles avoid the building solids") {
  const Environment env = box_world(10, 10, {{{4, 4, 6, 6}, 8.0}}, 5.0, 1.0);
  const MultiPath mp = multi_lawnmower(env, 3, 2.0, 1.0);
  for (const auto& traj : mp.trajectories) {
    for (const auto& s : traj.samples) {
      const bool in_solid = env.buildings[0].footprint.contains(s.p.ground()) &&
                            s.p.z <= env.buildings[0].height;
      CHECK_FALSE(in_solid);
      CHECK(s.observing == (std::fabs(s.p.z - env.optimal_altitude) <= 1e-9));
    }
  }
}

TEST_CASE("pairwise separation is preserved with buildings in the world") {
  const Environment env = box_world(12, 10, {{{5, 3, 7, 6}, 9.0}}, 5.0, 1.0);
  const MultiPath mp = multi_lawnmower(env, 4, 2.0, 1.0);
  const double len = mp.trajectories[0].length3d();
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(mp.trajectories[i].length3d() == doctest::Approx(len).epsilon(1e-6));
}
