#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/geometry.hpp"

namespace urbancover {

struct VisitInterval {
  double t_enter = 0.0;
  double t_leave = 0.0;
};

struct Probe {
  Vec2 position;
  std::vector<VisitInterval> visits;  ///< closed, disjoint, time ordered
  std::optional<double> open_since;   ///< an agent is inside right now
};

/// One agent's contribution to a metrics step.
struct AgentSample {
  Vec2 ground;
  bool observing = false;
};

/// Randomly sampled free-space probe points, each watching a disc.
struct ProbeSet {
  double probe_radius = 0.0;
  double sensor_radius = 0.0;
  std::vector<Probe> probes;
  double last_t = -1.0;  ///< record_step monotonicity guard

  std::size_t size() const { return probes.size(); }
};

/// Probes drawn uniformly over the free space with their own seed stream.
ProbeSet make_probes(const Environment& env, std::size_t count, double probe_radius,
                     std::uint64_t seed);

/// A probe is visited when an observing agent's footprint disc overlaps the
/// probe disc: ground distance <= sensor_radius + probe_radius (closed).
bool sees(const Vec2& probe, const AgentSample& agent, double sensor_radius, double probe_radius);

/// Opens a visit when any agent sees the probe and none was inside, closes it
/// when the last agent leaves. Timestamps must be strictly increasing.
void record_step(ProbeSet& probes, const std::vector<AgentSample>& team, double t);

/// The four evaluation metrics aggregated over probes (mean and population
/// standard deviation). Revisit gaps need two visits; probes with fewer
/// contribute zero. Open visits count toward time_spent up to t_now.
struct MetricsReport {
  double t = 0.0;
  double percent_coverage = 0.0;
  double mean_visits = 0.0;
  double std_visits = 0.0;
  double mean_revisit = 0.0;
  double std_revisit = 0.0;
  double mean_time_spent = 0.0;
  double std_time_spent = 0.0;
};

MetricsReport report(const ProbeSet& probes, double t_now);

/// CSV time series with the documented header.
void save_metrics_csv(const std::vector<MetricsReport>& rows, const std::string& file);

}  // namespace urbancover
