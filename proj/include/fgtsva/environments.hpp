#pragma once

#include <cstdint>

#include "fgtsva/bandit_core.hpp"
#include "fgtsva/rng.hpp"

namespace fgtsva {

// Per-round variance generator. Sparse: sigma^2 = 1 w.p. p else 0.
// Dense: sigma^2 ~ chi^2(1), drawn as the square of a standard normal.
// Deterministic: sigma^2 = 0. Constant: sigma^2 = v.
struct NoiseSchedule {
  enum class Kind { Sparse, Dense, Deterministic, Constant };

  static NoiseSchedule sparse(double p);
  static NoiseSchedule dense() { return {Kind::Dense, 0.0, 0.0}; }
  static NoiseSchedule deterministic() { return {Kind::Deterministic, 0.0, 0.0}; }
  static NoiseSchedule constant(double v);

  double draw_sigma_sq(RngStream& rng) const;

  Kind kind = Kind::Deterministic;
  double p = 0.0;  // Sparse
  double v = 0.0;  // Constant
};

// Uniform draw from the unit sphere: standard Gaussian vector, normalized.
Eigen::VectorXd sample_theta_star(RngStream& rng, int d);

// Linear reward with per-round Gaussian noise of revealed variance. All
// randomness comes from counter streams keyed by (seed, run_id, round), so two
// env instances with the same keys realize the identical (sigma, eps) path --
// agents compared within a run face the same environment.
class LinearEnv {
 public:
  LinearEnv(Eigen::VectorXd theta_star, ActionSet actions, NoiseSchedule noise, int horizon,
            std::uint64_t seed, std::uint64_t run_id);

  // Hypercube action set, theta_star from the unit sphere.
  static LinearEnv make(int d, NoiseSchedule noise, int horizon, std::uint64_t seed,
                        std::uint64_t run_id);

  struct RoundStart {
    int context_id = 0;
    double sigma_sq = 0.0;
  };

  RoundStart begin_round(int t);                    // reveals sigma_t^2
  double step(int t, const ActionChoice& chosen);   // reward for the chosen action

  const ActionSet& actions() const { return actions_; }
  const Eigen::VectorXd& theta_star() const { return theta_star_; }
  const RewardFunction& f_star() const { return f_star_; }
  int horizon() const { return horizon_; }

 private:
  Eigen::VectorXd theta_star_;
  RewardFunction f_star_;
  ActionSet actions_;
  NoiseSchedule noise_;
  int horizon_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t run_id_ = 0;
  int next_round_ = 1;
  bool awaiting_step_ = false;
  double current_sigma_sq_ = 0.0;
};

}  // namespace fgtsva
