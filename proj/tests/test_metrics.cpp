#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "urbancover/metrics.hpp"

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

ProbeSet one_probe(const Vec2& where, double sensor_radius = 1.0, double probe_radius = 0.5) {
  ProbeSet set;
  set.sensor_radius = sensor_radius;
  set.probe_radius = probe_radius;
  set.probes.push_back({where, {}, std::nullopt});
  return set;
}

}  // namespace

TEST_CASE("sees: overhead, altitude gate, and the closed boundary") {
  const Vec2 probe{5.0, 5.0};
  CHECK(sees(probe, {{5.0, 5.0}, true}, 1.0, 0.5));
  CHECK_FALSE(sees(probe, {{5.0, 5.0}, false}, 1.0, 0.5));
  CHECK(sees(probe, {{6.5, 5.0}, true}, 1.0, 0.5));        // exactly at reach
  CHECK_FALSE(sees(probe, {{6.5001, 5.0}, true}, 1.0, 0.5));
}

TEST_CASE("a pass-through opens one interval and closes on exit") {
  ProbeSet set = one_probe({0.0, 0.0});
  for (int t = 0; t < 10; ++t) {
    const double x = t < 3 ? 10.0 : (t <= 5 ? 0.5 : 10.0);  // inside during [3,5]
    record_step(set, {{{x, 0.0}, true}}, static_cast<double>(t));
  }
  REQUIRE(set.probes[0].visits.size() == 1);
  CHECK(set.probes[0].visits[0].t_enter == 3.0);
  CHECK(set.probes[0].visits[0].t_leave == 6.0);
  CHECK_FALSE(set.probes[0].open_since.has_value());
}

TEST_CASE("overlapping agents keep one open visit") {
  ProbeSet set = one_probe({0.0, 0.0});
  record_step(set, {{{0.1, 0.0}, true}, {{0.2, 0.0}, true}}, 0.0);
  record_step(set, {{{0.1, 0.0}, true}, {{9.0, 0.0}, true}}, 1.0);  // one stays
  record_step(set, {{{9.0, 0.0}, true}, {{9.0, 0.0}, true}}, 2.0);  // both gone
  REQUIRE(set.probes[0].visits.size() == 1);
  CHECK(set.probes[0].visits[0].t_enter == 0.0);
  CHECK(set.probes[0].visits[0].t_leave == 2.0);
  const MetricsReport r = report(set, 2.0);
  CHECK(r.mean_visits == doctest::Approx(1.0));
}

TEST_CASE("a three-phase trace records the revisit gap") {
  ProbeSet set = one_probe({0.0, 0.0});
  // Inside [0,2), outside [2,7), inside again from 7.
  for (int t = 0; t <= 9; ++t) {
    const bool inside = t < 2 || t >= 7;
    record_step(set, {{{inside ? 0.0 : 10.0, 0.0}, true}}, static_cast<double>(t));
  }
  REQUIRE(set.probes[0].visits.size() == 1);
  REQUIRE(set.probes[0].open_since.has_value());
  const MetricsReport r = report(set, 9.0);
  CHECK(r.mean_visits == doctest::Approx(2.0));
  CHECK(r.mean_revisit == doctest::Approx(5.0));  // left at 2, re-entered at 7
  CHECK(r.mean_time_spent == doctest::Approx(2.0 + 2.0));
}

TEST_CASE("non-monotone timestamps are rejected") {
  ProbeSet set = one_probe({0.0, 0.0});
  record_step(set, {{{0.0, 0.0}, true}}, 1.0);
  CHECK_THROWS_AS(record_step(set, {{{0.0, 0.0}, true}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(record_step(set, {{{0.0, 0.0}, true}}, 0.5), std::invalid_argument);
}

TEST_CASE("report with no visits is all zeros") {
  ProbeSet set = one_probe({0.0, 0.0});
  record_step(set, {{{9.0, 9.0}, true}}, 0.0);
  const MetricsReport r = report(set, 10.0);
  CHECK(r.percent_coverage == 0.0);
  CHECK(r.mean_visits == 0.0);
  CHECK(r.mean_revisit == 0.0);
  CHECK(r.mean_time_spent == 0.0);
}

TEST_CASE("a static covering agent accrues time_spent up to now") {
  ProbeSet set = one_probe({0.0, 0.0});
  for (int t = 0; t <= 100; ++t) record_step(set, {{{0.0, 0.0}, true}}, 0.1 * t);
  const MetricsReport r = report(set, 10.0);
  CHECK(r.percent_coverage == 100.0);
  CHECK(r.mean_visits == doctest::Approx(1.0));
  CHECK(r.mean_revisit == 0.0);
  CHECK(r.mean_time_spent == doctest::Approx(10.0));
}

TEST_CASE("time_spent equals seen-tick bookkeeping for random traces") {
  std::mt19937_64 rng(23);
  std::bernoulli_distribution coin(0.4);
  const double dt = 0.25;
  for (int trial = 0; trial < 20; ++trial) {
    ProbeSet set = one_probe({0.0, 0.0});
    int seen_ticks = 0;
    bool open_at_end = false;
    const int steps = 200;
    for (int k = 0; k <= steps; ++k) {
      const bool inside = coin(rng);
      record_step(set, {{{inside ? 0.0 : 10.0, 0.0}, true}}, dt * k);
      if (inside) ++seen_ticks;
      open_at_end = inside;
    }
    const double t_now = dt * steps;
    const MetricsReport r = report(set, t_now);
    const double expected = dt * (seen_ticks - (open_at_end ? 1 : 0));
    CHECK(r.mean_time_spent == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r.mean_time_spent <= t_now + 1e-9);
  }
}

TEST_CASE("coverage is monotone while recording") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const Environment env = box_world(10, 10, {});
  ProbeSet set = make_probes(env, 100, 0.5, 7);
  double prev = 0.0;
  Vec2 agent{5.0, 5.0};
  for (int k = 0; k <= 300; ++k) {
    agent = {u(rng), u(rng)};
    record_step(set, {{agent, true}}, 0.1 * k);
    const double cov = report(set, 0.1 * k).percent_coverage;
    CHECK(cov >= prev);
    prev = cov;
  }
}

TEST_CASE("probe placement avoids footprints and is deterministic") {
  const Environment env = box_world(10, 10, {{{2, 2, 8, 8}, 5.0}});
  const ProbeSet a = make_probes(env, 200, 0.5, 42);
  const ProbeSet b = make_probes(env, 200, 0.5, 42);
  REQUIRE(a.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK_FALSE(point_in_footprint(env, a.probes[i].position));
    CHECK(a.probes[i].position.x == b.probes[i].position.x);
    CHECK(a.probes[i].position.y == b.probes[i].position.y);
  }
}

TEST_CASE("empty probe sets cannot be reported") {
  ProbeSet empty;
  CHECK_THROWS_AS(report(empty, 1.0), std::invalid_argument);
  const Environment env = box_world(10, 10, {});
  CHECK_THROWS_AS(make_probes(env, 0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("metrics csv has the documented header") {
  std::vector<MetricsReport> rows(2);
  rows[0].t = 0.0;
  rows[1].t = 1.0;
  rows[1].percent_coverage = 50.0;
  const std::string file = "test_metrics_rows.csv";
  save_metrics_csv(rows, file);
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,percent_coverage,mean_visits,std_visits,mean_revisit,std_revisit,"
        "mean_time_spent,std_time_spent");
  std::remove(file.c_str());
}
