#include "urbancover/engine.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "urbancover/lawnmower.hpp"
#include "urbancover/partition.hpp"

namespace urbancover {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "lawnmower") return Algorithm::Lawnmower;
  if (name == "ergodic") return Algorithm::Ergodic;
  if (name == "biased-ergodic") return Algorithm::BiasedErgodic;
  if (name == "avoid-ergodic") return Algorithm::AvoidErgodic;
  if (name == "voronoi") return Algorithm::Voronoi;
  if (name == "grid") return Algorithm::Grid;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Lawnmower: return "lawnmower";
    case Algorithm::Ergodic: return "ergodic";
    case Algorithm::BiasedErgodic: return "biased-ergodic";
    case Algorithm::AvoidErgodic: return "avoid-ergodic";
    case Algorithm::Voronoi: return "voronoi";
    case Algorithm::Grid: return "grid";
  }
  return "lawnmower";
}

Seeds derive_seeds(std::uint64_t master) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  Seeds s;
  s.env = mix(master + 0x100);
  s.starts = mix(master + 0x200);
  s.control = mix(master + 0x300);
  s.probes = mix(master + 0x400);
  return s;
}

void SimConfig::check() const {
  if (agents < 1) throw std::invalid_argument("config: agents must be >= 1");
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
  if (u_max <= 0.0) throw std::invalid_argument("config: u_max must be positive");
  if (cell_size <= 0.0) throw std::invalid_argument("config: cell_size must be positive");
  if (probe_count == 0) throw std::invalid_argument("config: probe_count must be >= 1");
}

Environment make_environment(const SimConfig& config) {
  if (!config.env_file.empty()) return load_environment(config.env_file);
  EnvSpec spec = config.env_spec;
  spec.seed = config.seeds.env;
  return generate_environment(spec);
}

std::vector<Vec2> place_agents_free(const Environment& env, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("place_agents_free: need at least one agent");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, env.L1);
  std::uniform_real_distribution<double> uy(0.0, env.L2);
  std::vector<Vec2> out;
  out.reserve(n);
  constexpr int kMaxAttempts = 1000000;
  int attempts = 0;
  while (out.size() < n) {
    if (++attempts > kMaxAttempts)
      throw std::runtime_error("place_agents_free: no free space to place agents");
    const Vec2 p{ux(rng), uy(rng)};
    if (!point_in_footprint(env, p)) out.push_back(p);
  }
  return out;
}

std::vector<double> random_cycle_offsets(const Trajectory& cycle, std::size_t n,
                                         std::uint64_t seed) {
  const double len = cycle.length3d();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, len);
  std::vector<double> offsets(n);
  for (auto& o : offsets) o = u(rng);
  return offsets;
}

std::vector<Vec3> place_agents_on_cycle(const Trajectory& cycle,
                                        const std::vector<double>& offsets) {
  std::vector<Vec3> out;
  out.reserve(offsets.size());
  for (double o : offsets) out.push_back(cycle.point_at_arc_length(o));
  return out;
}

namespace {

MultiPath plan_paths(const SimConfig& config, const Environment& env) {
  const double spacing =
      config.lane_spacing > 0.0 ? config.lane_spacing : 2.0 * env.sensor_radius;

  switch (config.algorithm) {
    case Algorithm::Lawnmower: {
      if (config.equal_spacing)
        return multi_lawnmower(env, config.agents, spacing, config.u_max, config.clearance);
      // Protocol starts: independent random positions along the repaired cycle.
      SweepPlan plan = boustrophedon(env.L1, env.L2, spacing, env.sensor_radius, config.u_max,
                                     env.optimal_altitude);
      const Trajectory repaired =
          fly_over_buildings(plan.cycle, env, config.u_max, config.clearance);
      MultiPath mp;
      const auto offsets = random_cycle_offsets(repaired, config.agents, config.seeds.starts);
      for (std::size_t i = 0; i < config.agents; ++i) {
        Trajectory t = rotate_cycle(repaired, offsets[i]);
        t.agent_id = static_cast<int>(i);
        refresh_observing_flags(t, env.optimal_altitude);
        mp.trajectories.push_back(std::move(t));
      }
      return mp;
    }
    case Algorithm::Ergodic:
    case Algorithm::BiasedErgodic: {
      ErgodicParams params;
      params.K1 = params.K2 = config.modes_K;
      params.uniform_weights = config.uniform_weights;
      params.shared_coefficients = config.shared_coefficients;
      params.cell_size = config.cell_size;
      params.d_infl = config.d_infl;
      params.clearance = config.clearance;
      const auto starts = place_agents_free(env, config.agents, config.seeds.starts);
      const auto variant = config.algorithm == Algorithm::Ergodic ? ErgodicVariant::Naive
                                                                  : ErgodicVariant::Biased;
      return multi_ergodic(env, config.agents, variant, config.steps, config.dt, config.u_max,
                           config.seeds.control, params, starts);
    }
    case Algorithm::Voronoi: {
      CoverParams params;
      params.cell_size = config.cell_size;
      params.step_size = config.lloyd_step > 0.0 ? config.lloyd_step : config.u_max * config.dt;
      params.u_max = config.u_max;
      params.clearance = config.clearance;
      params.relocate_to_free = config.relocate_to_free;
      const auto starts = place_agents_free(env, config.agents, config.seeds.starts);
      return voronoi_cover(env, config.agents, config.steps, params, starts);
    }
    case Algorithm::Grid: {
      CoverParams params;
      params.cell_size = config.cell_size;
      params.u_max = config.u_max;
      params.clearance = config.clearance;
      params.relocate_to_free = config.relocate_to_free;
      const auto starts = place_agents_free(env, config.agents, config.seeds.starts);
      return grid_cover(env, config.agents, params, starts);
    }
    case Algorithm::AvoidErgodic:
      throw std::logic_error("avoid-ergodic runs closed-loop, not from a plan");
  }
  throw std::logic_error("unreachable");
}

}  // namespace

SimResult run(const SimConfig& config) {
  config.check();
  const auto wall_start = std::chrono::steady_clock::now();

  SimResult result;
  result.config = config;
  result.env = make_environment(config);
  const Environment& env = result.env;
  const double h_opt = env.optimal_altitude;

  const double probe_radius =
      config.probe_radius > 0.0 ? config.probe_radius : env.sensor_radius / 2.0;
  ProbeSet probes = make_probes(env, config.probe_count, probe_radius, config.seeds.probes);

  result.recorded.trajectories.resize(config.agents);
  for (std::size_t i = 0; i < config.agents; ++i) {
    result.recorded.trajectories[i].agent_id = static_cast<int>(i);
    result.recorded.trajectories[i].samples.reserve(config.steps + 1);
  }

  std::vector<AgentSample> team(config.agents);
  auto record_tick = [&](std::size_t k, const std::vector<Vec3>& positions) {
    const double t = config.dt * static_cast<double>(k);
    for (std::size_t i = 0; i < config.agents; ++i) {
      const bool observing = std::fabs(positions[i].z - h_opt) <= 1e-9;
      result.recorded.trajectories[i].samples.push_back({t, positions[i], observing});
      team[i] = {positions[i].ground(), observing};
    }
    record_step(probes, team, t);
    if (k % config.record_every == 0 || k == config.steps)
      result.series.push_back(report(probes, t));
  };

  if (config.algorithm == Algorithm::AvoidErgodic) {
    // Closed loop: the control law is re-evaluated from the live state each
    // tick instead of replaying a precomputed plan.
    ErgodicParams params;
    params.K1 = params.K2 = config.modes_K;
    params.uniform_weights = config.uniform_weights;
    params.shared_coefficients = config.shared_coefficients;
    params.cell_size = config.cell_size;
    params.d_infl = config.d_infl;
    params.clearance = config.clearance;
    ErgodicPlanner planner(env, ErgodicVariant::Avoiding, config.agents, config.u_max,
                           config.seeds.control, params);
    planner.set_positions(place_agents_free(env, config.agents, config.seeds.starts));

    auto lift = [&](const std::vector<Vec2>& ground) {
      std::vector<Vec3> out(ground.size());
      for (std::size_t i = 0; i < ground.size(); ++i) out[i] = {ground[i].x, ground[i].y, h_opt};
      return out;
    };
    record_tick(0, lift(planner.positions()));
    for (std::size_t k = 1; k <= config.steps; ++k) {
      planner.step(config.dt);
      record_tick(k, lift(planner.positions()));
    }
  } else {
    const MultiPath plan = plan_paths(config, env);
    std::vector<Vec3> positions(config.agents);
    for (std::size_t k = 0; k <= config.steps; ++k) {
      const double t = config.dt * static_cast<double>(k);
      for (std::size_t i = 0; i < config.agents; ++i)
        positions[i] = plan.trajectories[i].position_at(t);
      record_tick(k, positions);
    }
  }

  result.final_report = result.series.back();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

}  // namespace urbancover
