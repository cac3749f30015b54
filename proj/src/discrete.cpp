#include "fgtsva/discrete.hpp"

#include <cmath>
#include <stdexcept>

namespace fgtsva {

Eigen::VectorXd normalize_log_weights(Eigen::VectorXd log_weights) {
  const double m = log_weights.maxCoeff();
  Eigen::VectorXd w = (log_weights.array() - m).exp();
  w /= w.sum();
  return w;
}

Eigen::VectorXd discrete_posterior_weights(const std::vector<RewardFunction>& fclass,
                                           const Transcript& transcript, double lambda,
                                           const ActionSet& current_actions, int context_id,
                                           const Eigen::VectorXd& prior) {
  const auto n = static_cast<Eigen::Index>(fclass.size());
  if (n == 0) throw std::invalid_argument("discrete_posterior_weights: empty class");
  if (prior.size() != n) throw std::invalid_argument("discrete_posterior_weights: prior size mismatch");
  if (std::abs(prior.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("discrete_posterior_weights: prior does not sum to 1");

  Eigen::VectorXd log_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = fclass[static_cast<std::size_t>(i)];
    double lw = std::log(prior[i]);
    for (const auto& rec : transcript.records()) {
      const double resid = rec.reward - f.value_at(rec);
      lw -= resid * resid / rec.sigma_bar_sq;
    }
    if (lambda != 0.0) lw += lambda * argmax_action(f, current_actions, context_id).value;
    log_w[i] = lw;
  }
  return normalize_log_weights(std::move(log_w));
}

int categorical_sample(const Eigen::VectorXd& probs, RngStream& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

}  // namespace fgtsva
