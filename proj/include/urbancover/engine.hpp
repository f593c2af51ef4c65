#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/ergodic.hpp"
#include "urbancover/metrics.hpp"
#include "urbancover/trajectory.hpp"

namespace urbancover {

enum class Algorithm : std::uint8_t {
  Lawnmower,
  Ergodic,
  BiasedErgodic,
  AvoidErgodic,
  Voronoi,
  Grid,
};

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm alg);

struct Seeds {
  std::uint64_t env = 1;
  std::uint64_t starts = 2;
  std::uint64_t control = 3;
  std::uint64_t probes = 4;
};

/// Derives the four sub-seeds from one master seed.
Seeds derive_seeds(std::uint64_t master);

struct SimConfig {
  EnvSpec env_spec;       ///< used when env_file is empty
  std::string env_file;   ///< JSON environment, overrides env_spec
  Algorithm algorithm = Algorithm::Lawnmower;
  std::size_t agents = 1;
  std::size_t steps = 15000;
  double dt = 0.1;
  double u_max = 1.0;
  Seeds seeds;

  double cell_size = 0.5;
  std::size_t probe_count = 500;
  double probe_radius = 0.0;      ///< 0 = sensor_radius / 2
  std::size_t record_every = 100;  ///< metrics cadence in steps
  double clearance = 1.0;

  // ergodic
  std::size_t modes_K = 10;
  bool uniform_weights = false;
  bool shared_coefficients = true;
  double d_infl = 0.0;  ///< 0 = 2 * sensor_radius

  // lawnmower
  double lane_spacing = 0.0;  ///< 0 = 2 * sensor_radius
  bool equal_spacing = false;  ///< (i/n)*l offsets instead of random on-cycle starts

  // static covers
  double lloyd_step = 0.0;  ///< 0 = u_max * dt
  bool relocate_to_free = false;

  void check() const;
};

struct SimResult {
  Environment env;
  MultiPath recorded;  ///< steps + 1 samples per agent, clocked at k * dt
  std::vector<MetricsReport> series;
  MetricsReport final_report;
  double wall_seconds = 0.0;  ///< informational only, never serialized
  SimConfig config;
};

Environment make_environment(const SimConfig& config);

/// Uniform random free-space positions.
std::vector<Vec2> place_agents_free(const Environment& env, std::size_t n, std::uint64_t seed);

/// Uniform random arc-length offsets along a closed cycle.
std::vector<double> random_cycle_offsets(const Trajectory& cycle, std::size_t n,
                                         std::uint64_t seed);

/// Positions on the cycle polyline for the given offsets.
std::vector<Vec3> place_agents_on_cycle(const Trajectory& cycle, const std::vector<double>& offsets);

/// Runs one trial: plans (or steps, for the avoiding controller), records the
/// tick trajectories, and feeds every tick to the metrics recorder.
/// Deterministic given the seeds.
SimResult run(const SimConfig& config);

}  // namespace urbancover
