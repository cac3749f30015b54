#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fgtsva {

// bar_sigma_t = max{sigma_t, alpha}.
inline double bar_sigma(double sigma_sq, double alpha) {
  if (sigma_sq < 0.0 || alpha <= 0.0) throw std::invalid_argument("bar_sigma: bad inputs");
  return std::max(std::sqrt(sigma_sq), alpha);
}

// lambda_t = c * sqrt(Lambda_t) / bar_sigma_t^2.
inline double lambda_t(double c, double Lambda_t, double bar_sigma_t) {
  return c * std::sqrt(Lambda_t) / (bar_sigma_t * bar_sigma_t);
}

struct FunctionClassMeta {
  double log_cardinality = 0.0;
  double dc_estimate = 0.0;
};

struct Hyperparams {
  double alpha = 0.0;
  double c = 0.0;
};

// alpha = 1/sqrt(T); c = 2*sqrt(log|F| / dc) from class metadata, unless an
// explicit override is given (the experiments use the override).
inline Hyperparams default_hyperparams(int T, std::optional<FunctionClassMeta> meta,
                                       std::optional<double> c_override = std::nullopt) {
  if (T < 1) throw std::invalid_argument("default_hyperparams: T must be positive");
  Hyperparams h;
  h.alpha = 1.0 / std::sqrt(static_cast<double>(T));
  if (c_override) {
    h.c = *c_override;
  } else if (meta) {
    if (meta->dc_estimate <= 0.0)
      throw std::invalid_argument("default_hyperparams: dc estimate must be positive");
    h.c = 2.0 * std::sqrt(meta->log_cardinality / meta->dc_estimate);
  } else {
    throw std::invalid_argument("default_hyperparams: need class metadata or a c override");
  }
  return h;
}

// Running state of the weight schedule: bar_sigma_s, Lambda_t and the
// feel-good coefficient lambda_t, advanced once per round with the revealed
// sigma_t^2.
class ParamSchedule {
 public:
  ParamSchedule(double alpha, double c) : alpha_(alpha), c_(c) {
    if (alpha <= 0.0) throw std::invalid_argument("ParamSchedule: alpha must be positive");
    if (c < 0.0) throw std::invalid_argument("ParamSchedule: c must be nonnegative");
  }

  struct RoundParams {
    double bar_sigma_sq = 0.0;
    double lambda = 0.0;
  };

  RoundParams on_round(double sigma_sq) {
    const double bar = bar_sigma(sigma_sq, alpha_);
    Lambda_ += bar * bar;
    bar_sigmas_.push_back(bar);
    return {bar * bar, lambda_t(c_, Lambda_, bar)};
  }

  double Lambda() const { return Lambda_; }
  const std::vector<double>& bar_sigmas() const { return bar_sigmas_; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }

 private:
  double alpha_;
  double c_;
  double Lambda_ = 0.0;
  std::vector<double> bar_sigmas_;
};

}  // namespace fgtsva
