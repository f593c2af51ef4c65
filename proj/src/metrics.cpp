#include "urbancover/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace urbancover {

ProbeSet make_probes(const Environment& env, std::size_t count, double probe_radius,
                     std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("make_probes: need at least one probe");
  if (probe_radius < 0.0) throw std::invalid_argument("make_probes: negative probe radius");
  ProbeSet set;
  set.probe_radius = probe_radius;
  set.sensor_radius = env.sensor_radius;
  set.probes.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, env.L1);
  std::uniform_real_distribution<double> uy(0.0, env.L2);
  constexpr int kMaxAttempts = 1000000;
  int attempts = 0;
  while (set.probes.size() < count) {
    if (++attempts > kMaxAttempts)
      throw std::runtime_error("make_probes: could not sample free space");
    const Vec2 p{ux(rng), uy(rng)};
    if (!point_in_footprint(env, p)) set.probes.push_back({p, {}, std::nullopt});
  }
  return set;
}

bool sees(const Vec2& probe, const AgentSample& agent, double sensor_radius, double probe_radius) {
  if (!agent.observing) return false;
  const double reach = sensor_radius + probe_radius;
  return (agent.ground - probe).norm_sq() <= reach * reach;
}

void record_step(ProbeSet& probes, const std::vector<AgentSample>& team, double t) {
  if (t <= probes.last_t)
    throw std::invalid_argument("record_step: timestamps must be strictly increasing");
  probes.last_t = t;
  for (auto& probe : probes.probes) {
    bool seen = false;
    for (const auto& agent : team) {
      if (sees(probe.position, agent, probes.sensor_radius, probes.probe_radius)) {
        seen = true;
        break;
      }
    }
    if (seen && !probe.open_since) {
      probe.open_since = t;
    } else if (!seen && probe.open_since) {
      probe.visits.push_back({*probe.open_since, t});
      probe.open_since.reset();
    }
  }
}

MetricsReport report(const ProbeSet& probes, double t_now) {
  const std::size_t m = probes.size();
  if (m == 0) throw std::invalid_argument("report: empty probe set");

  std::size_t covered = 0;
  double sum_v = 0.0, sumsq_v = 0.0;
  double sum_r = 0.0, sumsq_r = 0.0;
  double sum_s = 0.0, sumsq_s = 0.0;

  for (const auto& probe : probes.probes) {
    const std::size_t visits = probe.visits.size() + (probe.open_since ? 1 : 0);
    if (visits > 0) ++covered;

    double spent = 0.0;
    for (const auto& v : probe.visits) spent += v.t_leave - v.t_enter;
    if (probe.open_since) spent += t_now - *probe.open_since;

    // Gaps between consecutive visits; the open visit supplies its entry.
    double revisit = 0.0;
    if (visits >= 2) {
      double gaps = 0.0;
      std::size_t gap_count = 0;
      for (std::size_t i = 1; i < probe.visits.size(); ++i) {
        gaps += probe.visits[i].t_enter - probe.visits[i - 1].t_leave;
        ++gap_count;
      }
      if (probe.open_since && !probe.visits.empty()) {
        gaps += *probe.open_since - probe.visits.back().t_leave;
        ++gap_count;
      }
      revisit = gaps / static_cast<double>(gap_count);
    }

    const auto v = static_cast<double>(visits);
    sum_v += v;
    sumsq_v += v * v;
    sum_r += revisit;
    sumsq_r += revisit * revisit;
    sum_s += spent;
    sumsq_s += spent * spent;
  }

  auto finish = [m](double sum, double sumsq, double& mean, double& stddev) {
    const auto dm = static_cast<double>(m);
    mean = sum / dm;
    stddev = std::sqrt(std::fmax(0.0, sumsq / dm - mean * mean));
  };

  MetricsReport r;
  r.t = t_now;
  r.percent_coverage = 100.0 * static_cast<double>(covered) / static_cast<double>(m);
  finish(sum_v, sumsq_v, r.mean_visits, r.std_visits);
  finish(sum_r, sumsq_r, r.mean_revisit, r.std_revisit);
  finish(sum_s, sumsq_s, r.mean_time_spent, r.std_time_spent);
  return r;
}

void save_metrics_csv(const std::vector<MetricsReport>& rows, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "t,percent_coverage,mean_visits,std_visits,mean_revisit,std_revisit,"
         "mean_time_spent,std_time_spent\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.t,
                  r.percent_coverage, r.mean_visits, r.std_visits, r.mean_revisit, r.std_revisit,
                  r.mean_time_spent, r.std_time_spent);
    out << line;
  }
}

}  // namespace urbancover
