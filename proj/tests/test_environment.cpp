#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "json.hpp"
#include "urbancover/environment.hpp"

using namespace urbancover;

namespace {

Environment box_world(double L1, double L2, std::vector<Building> buildings,
                      double altitude = 5.0, double radius = 2.5) {
  Environment env;
  env.L1 = L1;
  env.L2 = L2;
  env.buildings = std::move(buildings);
  env.optimal_altitude = altitude;
  env.sensor_radius = radius;
  env.max_altitude = std::max(altitude, env.max_building_height()) + 1.0;
  return env;
}

}  // namespace

TEST_CASE("tall-high family matches the published dimensions") {
  const EnvSpec spec = EnvSpec::named(EnvFamily::TallHigh, 42);
  const Environment env = generate_environment(spec);
  CHECK(env.L1 == doctest::Approx(50.96));
  CHECK(env.L2 == doctest::Approx(39.33));
  CHECK(env.buildings.size() == 27);
  for (const auto& b : env.buildings) {
    CHECK(b.height <= 29.50);
    CHECK(b.footprint.x_min >= 0.0);
    CHECK(b.footprint.y_min >= 0.0);
    CHECK(b.footprint.x_max <= env.L1);
    CHECK(b.footprint.y_max <= env.L2);
  }
  // Pairwise non-overlap.
  for (std::size_t i = 0; i < env.buildings.size(); ++i)
    for (std::size_t j = i + 1; j < env.buildings.size(); ++j)
      CHECK_FALSE(env.buildings[i].footprint.overlaps(env.buildings[j].footprint));
}

TEST_CASE("all named families generate") {
  for (auto family : {EnvFamily::TallHigh, EnvFamily::TallLow, EnvFamily::ShortHigh,
                      EnvFamily::ShortLow, EnvFamily::Mixed}) {
    const Environment env = generate_environment(EnvSpec::named(family, 7));
    CHECK(env.buildings.size() == EnvSpec::named(family, 7).building_count);
    CHECK(env.validate().empty());
  }
}

TEST_CASE("zero buildings gives an obstacle-free world") {
  EnvSpec spec;
  spec.L1 = spec.L2 = 10.0;
  spec.building_count = 0;
  const Environment env = generate_environment(spec);
  CHECK(env.buildings.empty());
  CHECK_FALSE(point_in_obstacle(env, {5.0, 5.0}));
}

TEST_CASE("generation is deterministic for a fixed seed") {
  EnvSpec spec = EnvSpec::named(EnvFamily::ShortHigh, 7);
  const Environment a = generate_environment(spec);
  const Environment b = generate_environment(spec);
  REQUIRE(a.buildings.size() == b.buildings.size());
  for (std::size_t i = 0; i < a.buildings.size(); ++i) {
    CHECK(a.buildings[i].footprint.x_min == b.buildings[i].footprint.x_min);
    CHECK(a.buildings[i].footprint.y_max == b.buildings[i].footprint.y_max);
    CHECK(a.buildings[i].height == b.buildings[i].height);
  }
}

TEST_CASE("impossible density fails with a diagnostic") {
  EnvSpec spec;
  spec.L1 = spec.L2 = 10.0;
  spec.building_count = 100;
  spec.height_min = spec.height_max = 5.0;
  spec.footprint_min = 3.0;
  spec.footprint_max = 3.0;
  CHECK_THROWS_AS(generate_environment(spec), std::runtime_error);
}

TEST_CASE("obstacle membership uses closed footprints") {
  const Environment env = box_world(10, 10, {{{2, 3, 4, 6}, 8.0}});
  CHECK(point_in_obstacle(env, {3.0, 4.5}));       // interior
  CHECK(point_in_obstacle(env, {2.0, 3.0}));       // corner exactly on the edge
  CHECK(point_in_obstacle(env, {4.0, 5.0}));       // face
  CHECK_FALSE(point_in_obstacle(env, {1.999, 3.0}));
  CHECK_FALSE(point_in_obstacle(env, {5.0, 5.0}));
  CHECK_THROWS_AS(point_in_obstacle(env, {-0.1, 5.0}), std::domain_error);
  CHECK_THROWS_AS(point_in_obstacle(env, {5.0, 10.2}), std::domain_error);
}

TEST_CASE("free_area of an empty world is the full extent") {
  const Environment env = box_world(10, 10, {});
  CHECK(free_area(env, 0.1) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("free_area approaches the analytic value under refinement") {
  const Environment env = box_world(10, 10, {{{4, 3, 6, 6}, 8.0}});
  const double analytic = 100.0 - 6.0;
  const double perimeter = 2.0 * (2.0 + 3.0);
  double prev_err = 1e9;
  for (double cell : {0.2, 0.1, 0.05, 0.025}) {
    const double est = free_area(env, cell);
    const double err = std::fabs(est - analytic);
    CHECK(err <= perimeter * cell);
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }
}

TEST_CASE("cell_size larger than the extent is rejected") {
  const Environment env = box_world(10, 10, {});
  CHECK_THROWS_AS(free_area(env, 11.0), std::invalid_argument);
}

TEST_CASE("free and obstacle cells partition the grid exactly") {
  const Environment env =
      box_world(10, 10, {{{1, 1, 3, 2}, 6.0}, {{5, 5, 9, 9.5}, 7.0}});
  const GroundGrid grid(env.L1, env.L2, 0.05);
  const auto mask = obstacle_mask(env, grid);
  std::size_t obstacle = 0, free_count = 0;
  for (auto m : mask) (m ? obstacle : free_count)++;
  CHECK(obstacle + free_count == grid.cell_count());
  CHECK(free_area(env, 0.05) ==
        doctest::Approx(100.0 * static_cast<double>(free_count) /
                        static_cast<double>(grid.cell_count())));
}

TEST_CASE("segment crossings: misses, single pierce, two buildings") {
  const Environment env =
      box_world(20, 10, {{{3, 4, 5, 6}, 8.0}, {{10, 4, 12, 6}, 8.0}});

  CHECK(segment_building_crossings(env, {0, 1}, {20, 1}).empty());

  const auto one = segment_building_crossings(env, {0, 5}, {8, 5});
  REQUIRE(one.size() == 1);
  CHECK(one[0].building == 0);
  CHECK(one[0].t_in == doctest::Approx(3.0 / 8.0));
  CHECK(one[0].t_out == doctest::Approx(5.0 / 8.0));
  CHECK(one[0].t_in > 0.0);
  CHECK(one[0].t_out < 1.0);

  const auto two = segment_building_crossings(env, {0, 5}, {20, 5});
  REQUIRE(two.size() == 2);
  CHECK(two[0].building == 0);
  CHECK(two[1].building == 1);
  CHECK(two[0].t_in < two[1].t_in);
  CHECK(two[0].t_out <= two[1].t_in);
}

TEST_CASE("grazing contact counts as a crossing") {
  const Environment env = box_world(10, 10, {{{2, 2, 4, 4}, 8.0}});
  const auto touch = segment_building_crossings(env, {0, 4}, {10, 4});  // along the top face
  REQUIRE(touch.size() == 1);
  const auto corner = segment_building_crossings(env, {0, 2}, {4, 6});  // through (2,4) only
  CHECK(corner.size() == 1);
}

TEST_CASE("crossings against a dense sampling oracle") {
  std::mt19937_64 rng(99);
  const Environment env = generate_environment(EnvSpec::named(EnvFamily::TallLow, 3));
  std::uniform_real_distribution<double> ux(0.0, env.L1);
  std::uniform_real_distribution<double> uy(0.0, env.L2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 p{ux(rng), uy(rng)};
    const Vec2 q{ux(rng), uy(rng)};
    const auto crossings = segment_building_crossings(env, p, q);
    // Structure: ordered, and the interval interiors/gaps agree with
    // point membership.
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      CHECK(crossings[i].t_in <= crossings[i].t_out);
      if (i > 0) CHECK(crossings[i - 1].t_in <= crossings[i].t_in);
      const double mid = 0.5 * (crossings[i].t_in + crossings[i].t_out);
      CHECK(env.buildings[crossings[i].building].footprint.contains(p + (q - p) * mid));
    }
    // Sampled membership run count never exceeds the reported crossings,
    // and matches exactly whenever every interval and gap is wide enough
    // for the sampler to resolve.
    int runs = 0;
    bool inside = false;
    for (int k = 0; k <= 1000; ++k) {
      const bool now = point_in_footprint(env, p + (q - p) * (k / 1000.0));
      if (now && !inside) ++runs;
      inside = now;
    }
    CHECK(runs <= static_cast<int>(crossings.size()));
    double thinnest = 1.0;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      thinnest = std::fmin(thinnest, crossings[i].t_out - crossings[i].t_in);
      if (i > 0) thinnest = std::fmin(thinnest, crossings[i].t_in - crossings[i - 1].t_out);
    }
    if (thinnest > 4.0 / 1000.0) CHECK(runs == static_cast<int>(crossings.size()));
  }
}

TEST_CASE("nearest obstacle points away from the closest face") {
  const Environment env = box_world(20, 20, {{{5, 5, 8, 8}, 9.0}});
  const auto east = nearest_obstacle(env, {9.5, 6.0});
  CHECK(east.distance == doctest::Approx(1.5));
  CHECK(east.away.x == doctest::Approx(1.0));
  CHECK(east.away.y == doctest::Approx(0.0));

  // The domain boundary is not an obstacle.
  const Environment empty = box_world(20, 20, {});
  CHECK(std::isinf(nearest_obstacle(empty, {19.99, 10.0}).distance));

  CHECK_THROWS_AS(nearest_obstacle(env, {6.0, 6.0}), std::invalid_argument);
}

TEST_CASE("nearest obstacle tie is deterministic") {
  // Two faces equidistant from the probe point.
  const Environment env =
      box_world(20, 20, {{{4, 9, 6, 11}, 9.0}, {{8, 9, 10, 11}, 9.0}});
  const auto a = nearest_obstacle(env, {7.0, 10.0});
  const auto b = nearest_obstacle(env, {7.0, 10.0});
  CHECK(a.away.x == b.away.x);
  CHECK(a.away.y == b.away.y);
  CHECK(a.away.x == doctest::Approx(1.0));  // lowest-index building wins the tie
}

TEST_CASE("environment JSON round trip keeps the documented field names") {
  const Environment env = box_world(12.5, 8.25, {{{1, 2, 3, 4}, 9.5}}, 4.0, 2.0);
  const std::string text = environment_to_json(env);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.contains("extent"));
  CHECK(j.contains("optimal_altitude"));
  CHECK(j.contains("sensor_radius"));
  CHECK(j.contains("max_altitude"));
  CHECK(j["buildings"][0].contains("x_min"));
  CHECK(j["buildings"][0].contains("height"));

  const Environment back = environment_from_json(text);
  CHECK(back.L1 == env.L1);
  CHECK(back.L2 == env.L2);
  CHECK(back.buildings.size() == 1);
  CHECK(back.buildings[0].footprint.x_max == 3.0);
  CHECK(back.buildings[0].height == 9.5);
}

TEST_CASE("validation warns when sensing altitude clears every roof") {
  const Environment env = box_world(10, 10, {{{1, 1, 2, 2}, 3.0}}, 5.0);
  const auto warnings = env.validate();
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("the altitude-to-radius map passes through the calibration point") {
  const Environment env = box_world(10, 10, {}, 4.0, 2.0);
  CHECK(env.footprint_radius(4.0) == doctest::Approx(2.0));
  CHECK(env.footprint_radius(2.0) == doctest::Approx(1.0));
  CHECK(env.footprint_radius(8.0) == doctest::Approx(4.0));
}
