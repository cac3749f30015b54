#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fgtsva/bandit_core.hpp"
#include "fgtsva/rng.hpp"

namespace fgtsva {

// Unnormalized log-density of the variance-weighted feel-good posterior over
// the linear class with N(0, I_d/d) prior, additive constants dropped:
//   -(d/2)||theta||^2 - sum_s bar_sigma_s^-2 (r_s - <theta, phi_s>)^2
//   + lambda * max_a <theta, phi(a)>.
double log_posterior_unnorm(const Eigen::VectorXd& theta, const Transcript& transcript,
                            double lambda, const ActionSet& current_actions);

// Gradient of the above. The feel-good term contributes lambda * phi(a*(theta))
// with a*(theta) = argmax_linear(theta), a subgradient of the piecewise-linear
// max; sign boundaries use the zero -> +1/sqrt(d) tie rule.
Eigen::VectorXd grad_log_posterior(const Eigen::VectorXd& theta, const Transcript& transcript,
                                   double lambda, const ActionSet& current_actions);

// Running sufficient statistics of the quadratic likelihood part:
//   A = sum eta_s phi_s phi_s^T, b = sum eta_s r_s phi_s, r2 = sum eta_s r_s^2,
// with eta_s = bar_sigma_s^-2. Values and gradients cost O(d^2) instead of a
// pass over the transcript.
class LinearPosteriorStats {
 public:
  explicit LinearPosteriorStats(int d)
      : A_(Eigen::MatrixXd::Zero(d, d)), b_(Eigen::VectorXd::Zero(d)) {}

  void add(const Eigen::VectorXd& phi, double reward, double bar_sigma_sq) {
    const double eta = 1.0 / bar_sigma_sq;
    A_.noalias() += eta * phi * phi.transpose();
    b_.noalias() += eta * reward * phi;
    r2_ += eta * reward * reward;
    sum_eta_ += eta;
  }

  double value(const Eigen::VectorXd& theta, double lambda, const ActionSet& actions) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, double lambda,
                       const ActionSet& actions) const;

  double sum_weights() const { return sum_eta_; }
  int dim() const { return static_cast<int>(b_.size()); }

  // Precision of the Gaussian part of the posterior: d*I + 2A.
  Eigen::MatrixXd gaussian_precision() const {
    const auto d = b_.size();
    return static_cast<double>(d) * Eigen::MatrixXd::Identity(d, d) + 2.0 * A_;
  }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double r2_ = 0.0;
  double sum_eta_ = 0.0;
};

// K steps of theta <- theta + delta_k * grad(theta) + sqrt(2 delta_k) * xi,
// xi standard normal. GradFn maps VectorXd -> VectorXd. A non-finite gradient
// aborts the run.
template <typename GradFn>
void sgld_sample(Eigen::VectorXd& theta, GradFn&& grad, const std::vector<double>& step_sizes,
                 RngStream& rng) {
  for (double delta : step_sizes) {
    if (delta < 0.0) throw std::invalid_argument("sgld_sample: negative step size");
    const Eigen::VectorXd g = grad(theta);
    if (!g.allFinite()) throw std::runtime_error("sgld_sample: non-finite gradient");
    const double noise_scale = std::sqrt(2.0 * delta);
    for (int j = 0; j < theta.size(); ++j)
      theta[j] += delta * g[j] + noise_scale * rng.next_gaussian();
  }
}

template <typename GradFn>
void sgld_sample(Eigen::VectorXd& theta, GradFn&& grad, int steps, double delta,
                 RngStream& rng) {
  if (steps < 1) throw std::invalid_argument("sgld_sample: need at least one step");
  const std::vector<double> sched(static_cast<std::size_t>(steps), delta);
  sgld_sample(theta, std::forward<GradFn>(grad), sched, rng);
}

// Preconditioner M = precision^-1 for Langevin steps, held as a Cholesky
// factorization. apply() is M g; noise() is M^(1/2) xi, so the invariant
// Gaussian matches the target whatever the conditioning of the precision.
class SgldPreconditioner {
 public:
  explicit SgldPreconditioner(const Eigen::MatrixXd& precision) : llt_(precision) {
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("SgldPreconditioner: precision not positive-definite");
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& g) const { return llt_.solve(g); }

  Eigen::VectorXd noise(RngStream& rng) const {
    Eigen::VectorXd xi(llt_.matrixLLT().rows());
    for (int j = 0; j < xi.size(); ++j) xi[j] = rng.next_gaussian();
    return llt_.matrixU().solve(xi);  // L^-T xi has covariance M
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// theta <- theta + delta * M grad + sqrt(2 delta) * M^(1/2) xi. With M the
// inverse of the quadratic part's precision the step size is dimensionless:
// the Gaussian component contracts by (1 - delta) per step in every direction,
// so a small fixed delta both stays stable and keeps mixing as the posterior
// sharpens over rounds.
template <typename GradFn>
void sgld_sample_preconditioned(Eigen::VectorXd& theta, GradFn&& grad,
                                const SgldPreconditioner& pre, int steps, double delta,
                                RngStream& rng) {
  if (steps < 1) throw std::invalid_argument("sgld_sample_preconditioned: need >= 1 step");
  if (delta < 0.0) throw std::invalid_argument("sgld_sample_preconditioned: negative step");
  const double noise_scale = std::sqrt(2.0 * delta);
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd g = grad(theta);
    if (!g.allFinite()) throw std::runtime_error("sgld: non-finite gradient");
    theta += delta * pre.apply(g) + noise_scale * pre.noise(rng);
  }
}

}  // namespace fgtsva
