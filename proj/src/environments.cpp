#include "fgtsva/environments.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fgtsva {

NoiseSchedule NoiseSchedule::sparse(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("sparse noise: p outside [0, 1]");
  return {Kind::Sparse, p, 0.0};
}

NoiseSchedule NoiseSchedule::constant(double v) {
  if (v < 0.0) throw std::invalid_argument("constant noise: negative variance");
  return {Kind::Constant, 0.0, v};
}

double NoiseSchedule::draw_sigma_sq(RngStream& rng) const {
  switch (kind) {
    case Kind::Sparse:
      return rng.next_double() < p ? 1.0 : 0.0;
    case Kind::Dense: {
      const double z = rng.next_gaussian();
      return z * z;
    }
    case Kind::Deterministic:
      return 0.0;
    case Kind::Constant:
      return v;
  }
  return 0.0;
}

Eigen::VectorXd sample_theta_star(RngStream& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_theta_star: d must be positive");
  Eigen::VectorXd v(d);
  double norm_sq = 0.0;
  do {
    for (int j = 0; j < d; ++j) v[j] = rng.next_gaussian();
    norm_sq = v.squaredNorm();
  } while (norm_sq == 0.0);
  return v / std::sqrt(norm_sq);
}

LinearEnv::LinearEnv(Eigen::VectorXd theta_star, ActionSet actions, NoiseSchedule noise,
                     int horizon, std::uint64_t seed, std::uint64_t run_id)
    : theta_star_(std::move(theta_star)),
      f_star_(RewardFunction::linear(theta_star_)),
      actions_(std::move(actions)),
      noise_(noise),
      horizon_(horizon),
      seed_(seed),
      run_id_(run_id) {
  if (horizon_ < 1) throw std::invalid_argument("LinearEnv: horizon must be positive");
  if (std::abs(theta_star_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("LinearEnv: ||theta_star|| must be 1");
  if (theta_star_.size() != actions_.dim())
    throw std::invalid_argument("LinearEnv: theta/action dimension mismatch");
}

LinearEnv LinearEnv::make(int d, NoiseSchedule noise, int horizon, std::uint64_t seed,
                          std::uint64_t run_id) {
  RngStream rng(seed, run_id, 0, stream::theta_star);
  return LinearEnv(sample_theta_star(rng, d), ActionSet::hypercube(d), noise, horizon, seed,
                   run_id);
}

LinearEnv::RoundStart LinearEnv::begin_round(int t) {
  if (t != next_round_ || awaiting_step_)
    throw std::logic_error("begin_round: round " + std::to_string(t) + " out of order");
  if (t > horizon_) throw std::logic_error("begin_round: past the horizon");
  RngStream rng(seed_, run_id_, static_cast<std::uint64_t>(t), stream::sigma);
  current_sigma_sq_ = noise_.draw_sigma_sq(rng);
  awaiting_step_ = true;
  return {0, current_sigma_sq_};
}

double LinearEnv::step(int t, const ActionChoice& chosen) {
  if (!awaiting_step_ || t != next_round_)
    throw std::logic_error("step: round " + std::to_string(t) + " mismatch");
  double reward = theta_star_.dot(chosen.feature);
  if (current_sigma_sq_ > 0.0) {
    RngStream rng(seed_, run_id_, static_cast<std::uint64_t>(t), stream::noise);
    reward += std::sqrt(current_sigma_sq_) * rng.next_gaussian();
  }
  awaiting_step_ = false;
  ++next_round_;
  return reward;
}

}  // namespace fgtsva
