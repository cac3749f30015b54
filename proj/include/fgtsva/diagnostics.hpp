#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fgtsva/bandit_core.hpp"
#include "fgtsva/rng.hpp"

namespace fgtsva {

struct VarianceSumCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// sum_t bar_sigma_t^2 / sqrt(Lambda_t) <= 2 sqrt(Lambda_T), Lambda_t the
// running sum of bar_sigma^2.
VarianceSumCheck check_variance_sum_lemma(const std::vector<double>& bar_sigmas);

struct EllipticalCheck {
  double lhs = 0.0;
  double logdet_bound = 0.0;  // 2(log det Sigma_T - log det Sigma_0)
  double bound = 0.0;         // 2d log(1 + eps T / (d lambda))
  bool holds = false;
};

// Elliptical potential: sum_t min{beta_t ||phi_t||^2_{Sigma_{t-1}^-1}, 1} with
// Sigma_t = lambda I + sum_{s<=t} beta_s phi_s phi_s^T, checked against both
// the log-det intermediate and the closed-form bound.
EllipticalCheck elliptical_potential_check(const std::vector<Eigen::VectorXd>& features,
                                           const std::vector<double>& betas, double lambda,
                                           double epsilon);

// Enumeration-scale decoupling instance: a finite class over an explicit
// action set, T context-action points, weights beta_t <= epsilon, and a
// designated truth index.
struct GdcInstance {
  std::vector<RewardFunction> fclass;
  std::shared_ptr<const ActionSet> actions;
  std::vector<std::pair<int, std::int64_t>> points;  // (context, action id)
  std::vector<double> betas;
  double lambda = 1.0;
  double epsilon = 1.0;
  int f_star_index = 0;
};

// 64 log-spaced points over [1e-3, 1e3]. The definition quantifies over all
// gamma > 0, so a grid maximum is a lower bound on the true coefficient --
// sufficient for checking the "<= bound" direction.
std::vector<double> default_gamma_grid();

// Largest over the gamma grid of
//  [ sum_t max_f ( (f - f_*)(z_t) - (gamma/beta_t) sum_{s<t} beta_s (f - f_*)^2(z_s) )
//    - gamma lambda sum_t 1/beta_t ] / (1 + 1/(4 gamma)),
// floored at 0. The max over sequences decomposes per round.
double min_gdc_bruteforce(const GdcInstance& inst, const std::vector<double>& gamma_grid);

// sum_t min{1, beta_t D^2(z_t)} with
//   D^2(z) = sup_{f1,f2} (f1(z)-f2(z))^2 / (lambda + sum_{s<t} beta_s (f1-f2)^2(z_s)),
// the pair supremum exhausted directly.
double gen_eluder_dim(const GdcInstance& inst);

struct CheckReport {
  std::string checker;
  int instances = 0;
  int failures = 0;
  double max_ratio = 0.0;
  bool holds = false;
  std::string witness;  // description of the first failing instance, if any
};

// Random discretized-linear instances (d <= 3) against 2d log(1 + eps T / (d lambda)).
CheckReport check_linear_dc_bound(int n_instances, std::uint64_t seed);
// Random tabular instances (|F| <= 16, T <= 6) against the generalized Eluder dimension.
CheckReport check_dc_vs_eluder(int n_instances, std::uint64_t seed);

// Random positive sequences of length <= 1000 through check_variance_sum_lemma.
CheckReport run_variance_sum_sweep(int n_instances, std::uint64_t seed);
// Random instances (d <= 5, T <= 50, eps <= 4, lambda in {0.1, 1, 10}) through
// elliptical_potential_check.
CheckReport run_elliptical_sweep(int n_instances, std::uint64_t seed);

// Same samplers, exposed for the property-test suites.
GdcInstance random_linear_gdc_instance(RngStream& rng);
GdcInstance random_tabular_gdc_instance(RngStream& rng);

enum class MgfConvention {
  EighthBound,  // log E exp(l e) <= norm * l^2 / 8
  HalfBound,    // log E exp(l e) <= norm * l^2 / 2
};

struct MgfPoint {
  double lambda = 0.0;
  double log_mgf = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // 3 standard errors of the log-mean estimate
  bool in_range = true;
  bool ok = false;
};

struct MgfReport {
  std::vector<MgfPoint> points;
  bool holds = false;  // every in-range point within bound + slack
};

// Empirical moment-generating-function check of a noise generator against a
// declared subgaussian norm.
MgfReport empirical_mgf_check(const std::function<double()>& gen, double declared_norm,
                              const std::vector<double>& lambda_grid, int n_samples,
                              MgfConvention convention);

}  // namespace fgtsva
