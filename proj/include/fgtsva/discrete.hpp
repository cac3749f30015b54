#pragma once

#include <vector>

#include "fgtsva/bandit_core.hpp"
#include "fgtsva/rng.hpp"

namespace fgtsva {

// Posterior over a finite class:
//   w(f) propto prior(f) * exp(-sum_s bar_sigma_s^-2 (r_s - f(x_s, a_s))^2
//                              + lambda * max_a f(x_t, a)).
// Stabilized with log-sum-exp; the output sums to 1 within 1e-12.
Eigen::VectorXd discrete_posterior_weights(const std::vector<RewardFunction>& fclass,
                                           const Transcript& transcript, double lambda,
                                           const ActionSet& current_actions, int context_id,
                                           const Eigen::VectorXd& prior);

// Normalizes exp(log_w - max) in place and returns the probability vector.
Eigen::VectorXd normalize_log_weights(Eigen::VectorXd log_weights);

// One draw from a categorical distribution given a probability vector.
int categorical_sample(const Eigen::VectorXd& probs, RngStream& rng);

}  // namespace fgtsva
