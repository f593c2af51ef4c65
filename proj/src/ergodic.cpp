#include "urbancover/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace urbancover {

namespace {

constexpr double kZeroControl = 1e-30;  // below this the feedback has vanished

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double normalizer_h_k(std::size_t k1_idx, std::size_t k2_idx, double L1, double L2) {
  const double a1 = k1_idx == 0 ? L1 : L1 / 2.0;
  const double a2 = k2_idx == 0 ? L2 : L2 / 2.0;
  return std::sqrt(a1 * a2);
}

ModeGrid::ModeGrid(std::size_t K1, std::size_t K2, double L1, double L2, bool uniform_weights)
    : K1_(K1), K2_(K2), L1_(L1), L2_(L2) {
  if (L1 <= 0.0 || L2 <= 0.0) throw std::invalid_argument("ModeGrid: extent must be positive");
  k1_.resize(K1 + 1);
  k2_.resize(K2 + 1);
  for (std::size_t i = 0; i <= K1; ++i) k1_[i] = static_cast<double>(i) * std::numbers::pi / L1;
  for (std::size_t j = 0; j <= K2; ++j) k2_[j] = static_cast<double>(j) * std::numbers::pi / L2;
  h_.resize(mode_count());
  lambda_.resize(mode_count());
  for (std::size_t i = 0; i <= K1; ++i) {
    for (std::size_t j = 0; j <= K2; ++j) {
      const std::size_t m = index(i, j);
      h_[m] = normalizer_h_k(i, j, L1, L2);
      // Sobolev-style decay keeps high modes from dominating the feedback.
      lambda_[m] = uniform_weights
                       ? 1.0
                       : std::pow(1.0 + static_cast<double>(i * i + j * j), -1.5);
    }
  }
}

void ModeGrid::scale_weights(double c) {
  if (c <= 0.0) throw std::invalid_argument("ModeGrid: weight scale must be positive");
  for (auto& l : lambda_) l *= c;
}

double ModeGrid::basis(std::size_t k1_idx, std::size_t k2_idx, const Vec2& x) const {
  return std::cos(k1_[k1_idx] * x.x) * std::cos(k2_[k2_idx] * x.y) / h_[index(k1_idx, k2_idx)];
}

Vec2 ModeGrid::basis_gradient(std::size_t k1_idx, std::size_t k2_idx, const Vec2& x) const {
  const double inv_h = 1.0 / h_[index(k1_idx, k2_idx)];
  const double a = k1_[k1_idx] * x.x;
  const double b = k2_[k2_idx] * x.y;
  return {-k1_[k1_idx] * std::sin(a) * std::cos(b) * inv_h,
          -k2_[k2_idx] * std::cos(a) * std::sin(b) * inv_h};
}

void ModeGrid::eval_axes(const Vec2& x, BasisEval& out) const {
  auto fill = [](std::vector<double>& c, std::vector<double>& s, double theta, std::size_t K) {
    c.resize(K + 1);
    s.resize(K + 1);
    c[0] = 1.0;
    s[0] = 0.0;
    if (K == 0) return;
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    c[1] = c1;
    s[1] = s1;
    for (std::size_t i = 2; i <= K; ++i) {
      c[i] = 2.0 * c1 * c[i - 1] - c[i - 2];
      s[i] = 2.0 * c1 * s[i - 1] - s[i - 2];
    }
  };
  fill(out.c1, out.s1, std::numbers::pi * x.x / L1_, K1_);
  fill(out.c2, out.s2, std::numbers::pi * x.y / L2_, K2_);
}

void TargetDistribution::save_density_csv(const std::string& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      if (ix) out << ",";
      out << density[grid.index(ix, iy)];
    }
    out << "\n";
  }
}

std::vector<double> spectral_mu(const GroundGrid& grid, const std::vector<double>& density,
                                const ModeGrid& modes) {
  if (density.size() != grid.cell_count())
    throw std::invalid_argument("spectral_mu: density size does not match the grid");
  double mass = 0.0;
  for (double d : density) mass += d;
  mass *= grid.cell_area();
  if (std::fabs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("spectral_mu: density is not normalized");

  // Separable sum: fold x first, then y.
  const std::size_t K1 = modes.K1(), K2 = modes.K2();
  std::vector<double> cos1((K1 + 1) * grid.nx());
  for (std::size_t i = 0; i <= K1; ++i)
    for (std::size_t ix = 0; ix < grid.nx(); ++ix)
      cos1[i * grid.nx() + ix] = std::cos(modes.wavenumber1(i) * grid.center(ix, 0).x);
  std::vector<double> cos2((K2 + 1) * grid.ny());
  for (std::size_t j = 0; j <= K2; ++j)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy)
      cos2[j * grid.ny() + iy] = std::cos(modes.wavenumber2(j) * grid.center(0, iy).y);

  std::vector<double> row_fold((K1 + 1) * grid.ny(), 0.0);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t i = 0; i <= K1; ++i) {
      double acc = 0.0;
      const double* c = &cos1[i * grid.nx()];
      const double* d = &density[iy * grid.nx()];
      for (std::size_t ix = 0; ix < grid.nx(); ++ix) acc += c[ix] * d[ix];
      row_fold[i * grid.ny() + iy] = acc;
    }
  }

  std::vector<double> mu(modes.mode_count(), 0.0);
  for (std::size_t i = 0; i <= K1; ++i) {
    for (std::size_t j = 0; j <= K2; ++j) {
      double acc = 0.0;
      for (std::size_t iy = 0; iy < grid.ny(); ++iy)
        acc += row_fold[i * grid.ny() + iy] * cos2[j * grid.ny() + iy];
      mu[modes.index(i, j)] = acc * grid.cell_area() / modes.normalizer(modes.index(i, j));
    }
  }
  return mu;
}

TargetDistribution make_vacant_target(double L1, double L2, double cell_size,
                                      const ModeGrid& modes) {
  GroundGrid grid(L1, L2, cell_size);
  std::vector<double> density(grid.cell_count(), 1.0 / (L1 * L2));
  auto mu = spectral_mu(grid, density, modes);
  return {TargetKind::Vacant, grid, std::move(density), std::move(mu)};
}

TargetDistribution make_free_target(const Environment& env, double cell_size,
                                    const ModeGrid& modes) {
  GroundGrid grid(env.L1, env.L2, cell_size);
  const auto obstacles = obstacle_mask(env, grid);
  const auto free_cells = static_cast<std::size_t>(
      std::count(obstacles.begin(), obstacles.end(), std::uint8_t{0}));
  if (free_cells == 0) throw std::runtime_error("make_free_target: no free space");
  const double value = 1.0 / (static_cast<double>(free_cells) * grid.cell_area());
  std::vector<double> density(grid.cell_count(), 0.0);
  for (std::size_t i = 0; i < density.size(); ++i)
    if (!obstacles[i]) density[i] = value;
  auto mu = spectral_mu(grid, density, modes);
  return {TargetKind::Free, grid, std::move(density), std::move(mu)};
}

ErgodicState::ErgodicState(std::size_t n, double u_max_, const ModeGrid& modes, std::uint64_t seed)
    : agent_count(n), u_max(u_max_), C(modes.mode_count(), 0.0), positions(n),
      heading_rng(mix_seed(seed, 0x45)) {
  if (n < 1) throw std::invalid_argument("ErgodicState: need at least one agent");
  if (u_max_ <= 0.0) throw std::invalid_argument("ErgodicState: u_max must be positive");
}

void accumulate_coefficients(ErgodicState& state, const ModeGrid& modes,
                             const std::vector<Vec2>& positions, double dt) {
  if (positions.size() != state.agent_count)
    throw std::invalid_argument("accumulate_coefficients: one position per agent required");
  if (dt < 0.0) throw std::invalid_argument("accumulate_coefficients: dt must be non-negative");
  ModeGrid::BasisEval ev;
  const std::size_t K2 = modes.K2();
  for (const auto& x : positions) {
    modes.eval_axes(x, ev);
    for (std::size_t i = 0; i <= modes.K1(); ++i) {
      const double ci = ev.c1[i] * dt;
      for (std::size_t j = 0; j <= K2; ++j)
        state.C[i * (K2 + 1) + j] += ci * ev.c2[j] / modes.normalizer(modes.index(i, j));
    }
  }
  state.t += dt;
  state.positions = positions;
}

namespace {

/// Unit direction of the ergodic feedback, or a seeded random heading when
/// the feedback vanishes (t = 0, domain corners).
Vec2 control_direction(ErgodicState& state, std::size_t agent, const ModeGrid& modes,
                       const TargetDistribution& target) {
  if (agent >= state.agent_count) throw std::invalid_argument("control: agent out of range");
  ModeGrid::BasisEval ev;
  modes.eval_axes(state.positions[agent], ev);
  const double Nt = static_cast<double>(state.agent_count) * state.t;
  double bx = 0.0, by = 0.0;
  const std::size_t K2 = modes.K2();
  for (std::size_t i = 0; i <= modes.K1(); ++i) {
    for (std::size_t j = 0; j <= K2; ++j) {
      const std::size_t m = i * (K2 + 1) + j;
      const double S = state.C[m] - Nt * target.mu[m];
      const double w = modes.weight(m) * S / modes.normalizer(m);
      bx += w * (-modes.wavenumber1(i)) * ev.s1[i] * ev.c2[j];
      by += w * (-modes.wavenumber2(j)) * ev.c1[i] * ev.s2[j];
    }
  }
  const double norm = std::sqrt(bx * bx + by * by);
  if (norm < kZeroControl) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double a = angle(state.heading_rng);
    return {std::cos(a), std::sin(a)};
  }
  return {-bx / norm, -by / norm};
}

}  // namespace

Vec2 control_step(ErgodicState& state, std::size_t agent, const ModeGrid& modes,
                  const TargetDistribution& target) {
  const Vec2 dir = control_direction(state, agent, modes, target);
  return dir * state.u_max;
}

double bump_alpha(double distance, double d_infl) {
  if (d_infl <= 0.0) throw std::invalid_argument("bump_alpha: d_infl must be positive");
  if (distance < 0.0) throw std::invalid_argument("bump_alpha: distance must be non-negative");
  return std::fmin(1.0, distance / d_infl);
}

Vec2 repulsive_field(const Environment& env, const Vec2& x, double d_infl) {
  if (d_infl <= 0.0) throw std::invalid_argument("repulsive_field: d_infl must be positive");
  const NearestObstacle near = nearest_obstacle(env, x);
  if (near.distance > d_infl) return {0.0, 0.0};
  return near.away;
}

Vec2 avoid_control_step(ErgodicState& state, std::size_t agent, const Environment& env,
                        const ModeGrid& modes, const TargetDistribution& target, double d_infl) {
  const NearestObstacle near = nearest_obstacle(env, state.positions[agent]);
  const double alpha = bump_alpha(near.distance, d_infl);
  if (alpha >= 1.0) return control_step(state, agent, modes, target);
  const Vec2 dir = control_direction(state, agent, modes, target);
  Vec2 blend = dir * alpha + near.away * (1.0 - alpha);
  double norm = blend.norm();
  if (norm < 1e-12) {
    // Head-on cancellation; retreat along the repulsion.
    blend = near.away;
    norm = 1.0;
  }
  return blend * (state.u_max / norm);
}

double ergodic_metric(const ErgodicState& state, const ModeGrid& modes,
                      const TargetDistribution& target) {
  double phi = 0.0;
  for (std::size_t m = 0; m < modes.mode_count(); ++m) {
    const double diff = state.c_k(m) - target.mu[m];
    phi += modes.weight(m) * diff * diff;
  }
  return phi;
}

namespace {

// Billiard reflection at the walls. Plain clamping parks agents exactly on
// the boundary, where every basis gradient's normal component vanishes
// (sin(0)), so the feedback can never pull them back in; mirroring matches
// the even symmetry of the cosine basis and keeps the dynamics ergodic.
Vec2 reflect_into_domain(const Vec2& p, double L1, double L2) {
  auto fold = [](double v, double L) {
    if (v < 0.0) v = -v;
    if (v > L) v = 2.0 * L - v;
    return clamp(v, 0.0, L);  // steps never exceed L, this guards rounding
  };
  return {fold(p.x, L1), fold(p.y, L2)};
}

/// Last-resort step truncation so a discrete step can never land inside a
/// footprint; the repulsive blend keeps agents clear long before this.
Vec2 clip_free_step(const Environment& env, const Vec2& from, const Vec2& to) {
  const auto crossings = segment_building_crossings(env, from, to);
  if (crossings.empty()) return to;
  const double t_stop = std::fmax(crossings.front().t_in - 1e-9, 0.0);
  return from + (to - from) * t_stop;
}

}  // namespace

ErgodicPlanner::ErgodicPlanner(const Environment& env, ErgodicVariant variant, std::size_t n,
                               double u_max, std::uint64_t seed, const ErgodicParams& params)
    : env_(env),
      variant_(variant),
      modes_(params.K1, params.K2, env.L1, env.L2, params.uniform_weights),
      target_(variant == ErgodicVariant::Naive
                  ? make_vacant_target(env.L1, env.L2, params.cell_size, modes_)
                  : make_free_target(env, params.cell_size, modes_)),
      d_infl_(params.d_infl > 0.0 ? params.d_infl : 2.0 * env.sensor_radius),
      positions_(n) {
  if (n < 1) throw std::invalid_argument("ErgodicPlanner: need at least one agent");
  if (params.shared_coefficients) {
    states_.emplace_back(n, u_max, modes_, seed);
  } else {
    for (std::size_t j = 0; j < n; ++j) states_.emplace_back(1, u_max, modes_, mix_seed(seed, j));
  }
}

void ErgodicPlanner::set_positions(const std::vector<Vec2>& starts) {
  if (starts.size() != positions_.size())
    throw std::invalid_argument("ErgodicPlanner: one start per agent");
  if (variant_ == ErgodicVariant::Avoiding) {
    for (const auto& s : starts)
      if (point_in_obstacle(env_, s))
        throw std::invalid_argument("ErgodicPlanner: start lies inside an obstacle");
  }
  positions_ = starts;
  if (states_.size() == 1) {
    states_[0].positions = starts;
  } else {
    for (std::size_t j = 0; j < starts.size(); ++j) states_[j].positions[0] = starts[j];
  }
}

Vec2 ErgodicPlanner::advance(ErgodicState& state, std::size_t agent, double dt) const {
  const bool avoid = variant_ == ErgodicVariant::Avoiding;
  const Vec2 u = avoid ? avoid_control_step(state, agent, env_, modes_, target_, d_infl_)
                       : control_step(state, agent, modes_, target_);
  Vec2 next = reflect_into_domain(state.positions[agent] + u * dt, env_.L1, env_.L2);
  if (avoid) next = clip_free_step(env_, state.positions[agent], next);
  return next;
}

void ErgodicPlanner::step(double dt) {
  if (dt <= 0.0) throw std::invalid_argument("ErgodicPlanner: dt must be positive");
  const std::size_t n = positions_.size();
  if (states_.size() == 1) {
    std::vector<Vec2> next(n);
    for (std::size_t j = 0; j < n; ++j) next[j] = advance(states_[0], j, dt);
    accumulate_coefficients(states_[0], modes_, next, dt);
    positions_ = std::move(next);
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 next = advance(states_[j], 0, dt);
      accumulate_coefficients(states_[j], modes_, {next}, dt);
      positions_[j] = next;
    }
  }
}

double ErgodicPlanner::phi() const {
  double sum = 0.0;
  for (const auto& s : states_) sum += ergodic_metric(s, modes_, target_);
  return sum / static_cast<double>(states_.size());
}

namespace {

Trajectory run_single(const TargetDistribution& target, const ModeGrid& modes,
                      const Environment* env, double d_infl, std::size_t steps, double dt,
                      double u_max, std::uint64_t seed, double altitude, const Vec2& start) {
  if (steps < 1) throw std::invalid_argument("ergodic: need at least one step");
  if (dt <= 0.0) throw std::invalid_argument("ergodic: dt must be positive");
  ErgodicState state(1, u_max, modes, seed);
  state.positions[0] = start;
  Trajectory traj;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back({0.0, {start.x, start.y, altitude}, true});
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec2 u = env ? avoid_control_step(state, 0, *env, modes, target, d_infl)
                       : control_step(state, 0, modes, target);
    Vec2 next = reflect_into_domain(state.positions[0] + u * dt, modes.L1(), modes.L2());
    if (env) next = clip_free_step(*env, state.positions[0], next);
    accumulate_coefficients(state, modes, {next}, dt);
    traj.samples.push_back(
        {dt * static_cast<double>(k + 1), {next.x, next.y, altitude}, true});
  }
  return traj;
}

}  // namespace

Trajectory single_ergodic(const TargetDistribution& target, const ModeGrid& modes,
                          std::size_t steps, double dt, double u_max, std::uint64_t seed,
                          double altitude, const Vec2& start) {
  return run_single(target, modes, nullptr, 0.0, steps, dt, u_max, seed, altitude, start);
}

Trajectory single_erg_avoid_obs(const TargetDistribution& target, const Environment& env,
                                const ModeGrid& modes, std::size_t steps, double dt, double u_max,
                                std::uint64_t seed, double d_infl, const Vec2& start) {
  if (point_in_obstacle(env, start))
    throw std::invalid_argument("single_erg_avoid_obs: start lies inside an obstacle");
  return run_single(target, modes, &env, d_infl, steps, dt, u_max, seed, env.optimal_altitude,
                    start);
}

ErgodicVariant parse_ergodic_variant(const std::string& name) {
  if (name == "naive") return ErgodicVariant::Naive;
  if (name == "biased") return ErgodicVariant::Biased;
  if (name == "avoiding") return ErgodicVariant::Avoiding;
  throw std::invalid_argument("unknown ergodic variant: " + name);
}

MultiPath multi_ergodic(const Environment& env, std::size_t n, ErgodicVariant variant,
                        std::size_t steps, double dt, double u_max, std::uint64_t seed,
                        const ErgodicParams& params, const std::vector<Vec2>& starts) {
  if (n < 1) throw std::invalid_argument("multi_ergodic: need at least one agent");
  if (starts.size() != n) throw std::invalid_argument("multi_ergodic: one start per agent");
  const double h_opt = env.optimal_altitude;

  ErgodicPlanner planner(env, variant, n, u_max, seed, params);
  planner.set_positions(starts);

  MultiPath mp;
  mp.trajectories.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mp.trajectories[i].agent_id = static_cast<int>(i);
    mp.trajectories[i].samples.reserve(steps + 1);
    mp.trajectories[i].samples.push_back({0.0, {starts[i].x, starts[i].y, h_opt}, true});
  }
  for (std::size_t k = 0; k < steps; ++k) {
    planner.step(dt);
    const double t = dt * static_cast<double>(k + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2& p = planner.positions()[j];
      mp.trajectories[j].samples.push_back({t, {p.x, p.y, h_opt}, true});
    }
  }

  if (variant != ErgodicVariant::Avoiding) {
    for (auto& traj : mp.trajectories)
      traj = fly_over_buildings(traj, env, u_max, params.clearance);
  }
  return mp;
}

}  // namespace urbancover
