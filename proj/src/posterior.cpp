#include "fgtsva/posterior.hpp"

namespace fgtsva {

namespace {

double feelgood_value(const Eigen::VectorXd& theta, const ActionSet& actions) {
  return argmax_linear(theta, actions).value;
}

}  // namespace

double log_posterior_unnorm(const Eigen::VectorXd& theta, const Transcript& transcript,
                            double lambda, const ActionSet& current_actions) {
  const double d = static_cast<double>(theta.size());
  double v = -0.5 * d * theta.squaredNorm();
  for (const auto& rec : transcript.records()) {
    if (rec.features.size() != theta.size())
      throw std::invalid_argument("log_posterior: dimension mismatch");
    const double resid = rec.reward - theta.dot(rec.features);
    v -= resid * resid / rec.sigma_bar_sq;
  }
  if (lambda != 0.0) v += lambda * feelgood_value(theta, current_actions);
  return v;
}

Eigen::VectorXd grad_log_posterior(const Eigen::VectorXd& theta, const Transcript& transcript,
                                   double lambda, const ActionSet& current_actions) {
  const double d = static_cast<double>(theta.size());
  Eigen::VectorXd g = -d * theta;
  for (const auto& rec : transcript.records()) {
    if (rec.features.size() != theta.size())
      throw std::invalid_argument("grad_log_posterior: dimension mismatch");
    const double resid = rec.reward - theta.dot(rec.features);
    g.noalias() += (2.0 * resid / rec.sigma_bar_sq) * rec.features;
  }
  if (lambda != 0.0) g.noalias() += lambda * argmax_linear(theta, current_actions).feature;
  return g;
}

double LinearPosteriorStats::value(const Eigen::VectorXd& theta, double lambda,
                                   const ActionSet& actions) const {
  const double d = static_cast<double>(theta.size());
  double v = -0.5 * d * theta.squaredNorm();
  v -= theta.dot(A_ * theta) - 2.0 * b_.dot(theta) + r2_;
  if (lambda != 0.0) v += lambda * feelgood_value(theta, actions);
  return v;
}

Eigen::VectorXd LinearPosteriorStats::grad(const Eigen::VectorXd& theta, double lambda,
                                           const ActionSet& actions) const {
  const double d = static_cast<double>(theta.size());
  Eigen::VectorXd g = -d * theta + 2.0 * (b_ - A_ * theta);
  if (lambda != 0.0) g.noalias() += lambda * argmax_linear(theta, actions).feature;
  return g;
}

}  // namespace fgtsva
