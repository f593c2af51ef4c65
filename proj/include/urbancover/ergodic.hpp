#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/trajectory.hpp"

namespace urbancover {

/// Separable cosine basis on [0,L1]x[0,L2]:
///   f_k(x) = (1/h_k) cos(k1 x1) cos(k2 x2),  k_i = K_i' * pi / L_i,
/// with modes (K1', K2') in [0..K1]x[0..K2] stored row-major.
class ModeGrid {
 public:
  ModeGrid(std::size_t K1, std::size_t K2, double L1, double L2, bool uniform_weights = false);

  std::size_t K1() const { return K1_; }
  std::size_t K2() const { return K2_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  std::size_t mode_count() const { return (K1_ + 1) * (K2_ + 1); }
  std::size_t index(std::size_t k1_idx, std::size_t k2_idx) const {
    return k1_idx * (K2_ + 1) + k2_idx;
  }

  double wavenumber1(std::size_t k1_idx) const { return k1_[k1_idx]; }
  double wavenumber2(std::size_t k2_idx) const { return k2_[k2_idx]; }
  double normalizer(std::size_t mode) const { return h_[mode]; }
  double weight(std::size_t mode) const { return lambda_[mode]; }
  void scale_weights(double c);  ///< multiplies every Lambda_k by c > 0

  double basis(std::size_t k1_idx, std::size_t k2_idx, const Vec2& x) const;
  Vec2 basis_gradient(std::size_t k1_idx, std::size_t k2_idx, const Vec2& x) const;

  /// Per-axis cosine/sine tables at a point, for batched mode sums.
  struct BasisEval {
    std::vector<double> c1, s1, c2, s2;
  };
  void eval_axes(const Vec2& x, BasisEval& out) const;

 private:
  std::size_t K1_, K2_;
  double L1_, L2_;
  std::vector<double> k1_, k2_;  // per-axis wavenumbers
  std::vector<double> h_;       // per-mode normalizers
  std::vector<double> lambda_;  // per-mode weights
};

/// Closed form sqrt(a1*a2) with a_i = L_i (zero mode) or L_i/2.
double normalizer_h_k(std::size_t k1_idx, std::size_t k2_idx, double L1, double L2);

enum class TargetKind : std::uint8_t { Vacant, Free, Custom };

/// Normalized coverage density over the ground grid with its spectral
/// coefficients mu_k.
struct TargetDistribution {
  TargetKind kind = TargetKind::Custom;
  GroundGrid grid;
  std::vector<double> density;  ///< per cell; sum * cell_area == 1
  std::vector<double> mu;       ///< per mode

  void save_density_csv(const std::string& file) const;
};

/// Uniform over the whole rectangle (obstacles ignored).
TargetDistribution make_vacant_target(double L1, double L2, double cell_size,
                                      const ModeGrid& modes);
/// Uniform over the free space, zero on obstacle cells.
TargetDistribution make_free_target(const Environment& env, double cell_size,
                                    const ModeGrid& modes);
/// mu_k = sum_cells density * f_k(center) * cell_area. Throws if the density
/// grid is not normalized.
std::vector<double> spectral_mu(const GroundGrid& grid, const std::vector<double>& density,
                                const ModeGrid& modes);

/// Team coverage state: running trajectory coefficients C_k, elapsed time,
/// and the agents' ground positions. M_k(t) = N * t * mu_k is derived.
struct ErgodicState {
  std::size_t agent_count = 1;
  double u_max = 1.0;
  double t = 0.0;
  std::vector<double> C;        ///< per mode, starts at zero
  std::vector<Vec2> positions;  ///< one per agent
  std::mt19937_64 heading_rng;  ///< consumed only when the control vanishes

  ErgodicState(std::size_t n, double u_max_, const ModeGrid& modes, std::uint64_t seed);

  double M_k(std::size_t mode, const TargetDistribution& target) const {
    return static_cast<double>(agent_count) * t * target.mu[mode];
  }
  /// Time-averaged coefficient C_k / (N t); zero at t = 0.
  double c_k(std::size_t mode) const {
    return t > 0.0 ? C[mode] / (static_cast<double>(agent_count) * t) : 0.0;
  }
};

/// C_k += sum_j f_k(x_j) * dt for every mode; advances the clock.
void accumulate_coefficients(ErgodicState& state, const ModeGrid& modes,
                             const std::vector<Vec2>& positions, double dt);

/// Ergodic feedback velocity for agent j: u = -u_max B / ||B|| with
/// B = sum_k Lambda_k (C_k - M_k) grad f_k(x_j). A vanishing B falls back to
/// a seeded random heading at full speed.
Vec2 control_step(ErgodicState& state, std::size_t agent, const ModeGrid& modes,
                  const TargetDistribution& target);

/// Unit repulsion away from the nearest footprint or wall; zero beyond the
/// influence distance. Throws if x sits inside an obstacle.
Vec2 repulsive_field(const Environment& env, const Vec2& x, double d_infl);

/// Linear bump factor: 0 at contact, 1 at and beyond the influence distance.
double bump_alpha(double distance, double d_infl);

/// Obstacle-aware control: blends the ergodic direction with the repulsive
/// field by the bump factor, keeping speed u_max. Far from obstacles this is
/// exactly control_step; at contact it points away from the obstacle.
Vec2 avoid_control_step(ErgodicState& state, std::size_t agent, const Environment& env,
                        const ModeGrid& modes, const TargetDistribution& target, double d_infl);

/// Weighted spectral defect Phi(t) = sum_k Lambda_k (C_k/(Nt) - mu_k)^2.
double ergodic_metric(const ErgodicState& state, const ModeGrid& modes,
                      const TargetDistribution& target);

struct ErgodicParams {
  std::size_t K1 = 10;
  std::size_t K2 = 10;
  bool uniform_weights = false;
  bool shared_coefficients = true;  ///< one C_k for the team (the N-summed law)
  double cell_size = 0.5;
  double d_infl = 0.0;  ///< 0 = default 2 * sensor_radius
  double clearance = 1.0;
};

/// Single-agent ergodic path over an arbitrary target, flown at `altitude`.
Trajectory single_ergodic(const TargetDistribution& target, const ModeGrid& modes,
                          std::size_t steps, double dt, double u_max, std::uint64_t seed,
                          double altitude, const Vec2& start);

/// Obstacle-avoiding single-agent variant; all samples stay in free space.
Trajectory single_erg_avoid_obs(const TargetDistribution& target, const Environment& env,
                                const ModeGrid& modes, std::size_t steps, double dt, double u_max,
                                std::uint64_t seed, double d_infl, const Vec2& start);

enum class ErgodicVariant : std::uint8_t { Naive, Biased, Avoiding };

ErgodicVariant parse_ergodic_variant(const std::string& name);

/// Synchronized team stepper over one of the three variants. With shared
/// coefficients the whole team feeds a single C_k (the N-summed law);
/// otherwise each agent runs its own single-agent recursion.
class ErgodicPlanner {
 public:
  ErgodicPlanner(const Environment& env, ErgodicVariant variant, std::size_t n, double u_max,
                 std::uint64_t seed, const ErgodicParams& params);

  void set_positions(const std::vector<Vec2>& starts);
  const std::vector<Vec2>& positions() const { return positions_; }
  double elapsed() const { return states_.front().t; }

  /// One tick: compute every agent's control from the current state, move,
  /// then fold the new positions into the coefficients.
  void step(double dt);

  /// Spectral defect of the team state (mean over states when independent).
  double phi() const;

  const ModeGrid& modes() const { return modes_; }
  const TargetDistribution& target() const { return target_; }

 private:
  Vec2 advance(ErgodicState& state, std::size_t agent, double dt) const;

  const Environment& env_;
  ErgodicVariant variant_;
  ModeGrid modes_;
  TargetDistribution target_;
  double d_infl_;
  std::vector<ErgodicState> states_;  ///< one shared or one per agent
  std::vector<Vec2> positions_;
};

/// Team planner covering the three variants: naive plans over the vacant
/// target and repairs over buildings, biased plans over the free-space
/// target and repairs, avoiding uses the repulsive blend and never climbs.
MultiPath multi_ergodic(const Environment& env, std::size_t n, ErgodicVariant variant,
                        std::size_t steps, double dt, double u_max, std::uint64_t seed,
                        const ErgodicParams& params, const std::vector<Vec2>& starts);

}  // namespace urbancover
