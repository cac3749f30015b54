#include "fgtsva/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fgtsva {

VarianceSumCheck check_variance_sum_lemma(const std::vector<double>& bar_sigmas) {
  VarianceSumCheck out;
  double Lambda = 0.0;
  for (double bar : bar_sigmas) {
    if (bar <= 0.0) throw std::invalid_argument("variance-sum lemma: bar sigmas must be > 0");
    const double sq = bar * bar;
    Lambda += sq;
    out.lhs += sq / std::sqrt(Lambda);
  }
  out.rhs = 2.0 * std::sqrt(Lambda);
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

EllipticalCheck elliptical_potential_check(const std::vector<Eigen::VectorXd>& features,
                                           const std::vector<double>& betas, double lambda,
                                           double epsilon) {
  if (features.size() != betas.size())
    throw std::invalid_argument("elliptical check: features/betas length mismatch");
  if (lambda <= 0.0) throw std::invalid_argument("elliptical check: lambda must be > 0");
  const auto T = features.size();
  EllipticalCheck out;
  if (T == 0) {
    out.holds = true;
    return out;
  }
  const auto d = features.front().size();
  Eigen::MatrixXd Sigma = lambda * Eigen::MatrixXd::Identity(d, d);
  const double logdet0 = static_cast<double>(d) * std::log(lambda);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& phi = features[t];
    if (phi.size() != d) throw std::invalid_argument("elliptical check: mixed dimensions");
    if (phi.norm() > 1.0 + 1e-9) throw std::invalid_argument("elliptical check: ||phi|| > 1");
    if (betas[t] <= 0.0 || betas[t] > epsilon + 1e-12)
      throw std::invalid_argument("elliptical check: beta outside (0, epsilon]");
    const Eigen::VectorXd u = Sigma.ldlt().solve(phi);
    out.lhs += std::min(betas[t] * phi.dot(u), 1.0);
    Sigma.noalias() += betas[t] * phi * phi.transpose();
  }
  const double logdetT = 2.0 * Eigen::MatrixXd(Sigma.llt().matrixL()).diagonal().array().log().sum();
  out.logdet_bound = 2.0 * (logdetT - logdet0);
  out.bound = 2.0 * static_cast<double>(d) *
              std::log(1.0 + epsilon * static_cast<double>(T) / (static_cast<double>(d) * lambda));
  out.holds = out.lhs <= out.logdet_bound + 1e-9 && out.lhs <= out.bound + 1e-9 &&
              out.logdet_bound <= out.bound + 1e-9;
  return out;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid(64);
  for (int i = 0; i < 64; ++i)
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 63.0);
  return grid;
}

namespace {

// eval(i, t) = f_i(z_t) for every class member and instance point.
Eigen::MatrixXd evaluate_class(const GdcInstance& inst) {
  const auto n = static_cast<Eigen::Index>(inst.fclass.size());
  const auto T = static_cast<Eigen::Index>(inst.points.size());
  Eigen::MatrixXd eval(n, T);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < T; ++t) {
      const auto& [ctx, aid] = inst.points[static_cast<std::size_t>(t)];
      eval(i, t) = inst.fclass[static_cast<std::size_t>(i)].value(*inst.actions, ctx, aid);
    }
  return eval;
}

void validate_instance(const GdcInstance& inst) {
  if (inst.fclass.empty()) throw std::invalid_argument("gdc instance: empty class");
  if (!inst.actions) throw std::invalid_argument("gdc instance: missing action set");
  if (inst.points.size() != inst.betas.size())
    throw std::invalid_argument("gdc instance: points/betas length mismatch");
  if (inst.f_star_index < 0 || inst.f_star_index >= static_cast<int>(inst.fclass.size()))
    throw std::invalid_argument("gdc instance: bad f_star index");
  for (double b : inst.betas)
    if (b <= 0.0 || b > inst.epsilon + 1e-12)
      throw std::invalid_argument("gdc instance: beta outside (0, epsilon]");
}

}  // namespace

double min_gdc_bruteforce(const GdcInstance& inst, const std::vector<double>& gamma_grid) {
  validate_instance(inst);
  if (gamma_grid.empty()) throw std::invalid_argument("min_gdc_bruteforce: empty gamma grid");
  const auto n = static_cast<Eigen::Index>(inst.fclass.size());
  const auto T = static_cast<Eigen::Index>(inst.points.size());
  const Eigen::MatrixXd eval = evaluate_class(inst);
  const Eigen::MatrixXd gap =
      eval.rowwise() - eval.row(inst.f_star_index);  // gap(i, t) = (f_i - f_*)(z_t)

  // prefix(i, t) = sum_{s<t} beta_s * gap(i, s)^2
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(n, T);
  for (Eigen::Index t = 1; t < T; ++t)
    prefix.col(t) = prefix.col(t - 1) +
                    inst.betas[static_cast<std::size_t>(t - 1)] *
                        gap.col(t - 1).array().square().matrix();

  double inv_beta_sum = 0.0;
  for (double b : inst.betas) inv_beta_sum += 1.0 / b;

  double best = 0.0;
  for (double gamma : gamma_grid) {
    double numer = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const double scale = gamma / inst.betas[static_cast<std::size_t>(t)];
      numer += (gap.col(t) - scale * prefix.col(t)).maxCoeff();
    }
    numer -= gamma * inst.lambda * inv_beta_sum;
    best = std::max(best, numer / (1.0 + 1.0 / (4.0 * gamma)));
  }
  return best;
}

double gen_eluder_dim(const GdcInstance& inst) {
  validate_instance(inst);
  const auto n = static_cast<Eigen::Index>(inst.fclass.size());
  const auto T = static_cast<Eigen::Index>(inst.points.size());
  const Eigen::MatrixXd eval = evaluate_class(inst);

  // hist(i, j) = sum over past rounds of beta_s * (f_i - f_j)^2(z_s)
  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(n, n);
  double dim = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double beta = inst.betas[static_cast<std::size_t>(t)];
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double diff = eval(i, t) - eval(j, t);
        d2 = std::max(d2, diff * diff / (inst.lambda + hist(i, j)));
      }
    dim += std::min(1.0, beta * d2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double diff = eval(i, t) - eval(j, t);
        hist(i, j) += beta * diff * diff;
      }
  }
  return dim;
}

namespace {

double pick_lambda(RngStream& rng) {
  const double options[] = {0.1, 1.0, 10.0};
  return options[rng.next_u64() % 3];
}

// Uniform in the unit ball: sphere direction scaled by U^(1/d).
Eigen::VectorXd ball_point(RngStream& rng, int d) {
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = rng.next_gaussian();
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(d);
  const double r = std::pow(1.0 - rng.next_double(), 1.0 / static_cast<double>(d));
  return v * (r / norm);
}

}  // namespace

GdcInstance random_linear_gdc_instance(RngStream& rng) {
  GdcInstance inst;
  const int d = 1 + static_cast<int>(rng.next_u64() % 3);
  const int class_size = 2 + static_cast<int>(rng.next_u64() % 63);  // <= 64
  const int n_actions = 2 + static_cast<int>(rng.next_u64() % 7);
  const int T = 1 + static_cast<int>(rng.next_u64() % 8);

  std::vector<Eigen::VectorXd> feats;
  feats.reserve(static_cast<std::size_t>(n_actions));
  for (int a = 0; a < n_actions; ++a) feats.push_back(ball_point(rng, d));
  inst.actions = std::make_shared<const ActionSet>(ActionSet::explicit_set(std::move(feats)));

  inst.fclass.reserve(static_cast<std::size_t>(class_size));
  for (int i = 0; i < class_size; ++i)
    inst.fclass.push_back(RewardFunction::linear(ball_point(rng, d)));
  inst.f_star_index = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(class_size));

  inst.lambda = pick_lambda(rng);
  const double eps_options[] = {0.5, 1.0, 2.0, 4.0};
  inst.epsilon = eps_options[rng.next_u64() % 4];
  for (int t = 0; t < T; ++t) {
    inst.points.emplace_back(0, static_cast<std::int64_t>(rng.next_u64() %
                                                          static_cast<std::uint64_t>(n_actions)));
    inst.betas.push_back(inst.epsilon * (1.0 - rng.next_double()));  // in (0, epsilon]
  }
  return inst;
}

GdcInstance random_tabular_gdc_instance(RngStream& rng) {
  GdcInstance inst;
  const int n_contexts = 1 + static_cast<int>(rng.next_u64() % 2);
  const int n_actions = 2 + static_cast<int>(rng.next_u64() % 4);
  const int class_size = 2 + static_cast<int>(rng.next_u64() % 15);  // <= 16
  const int T = 1 + static_cast<int>(rng.next_u64() % 6);

  std::vector<Eigen::VectorXd> feats;
  for (int a = 0; a < n_actions; ++a)
    feats.push_back(Eigen::VectorXd::Unit(n_actions, a));
  inst.actions = std::make_shared<const ActionSet>(ActionSet::explicit_set(std::move(feats)));

  for (int i = 0; i < class_size; ++i) {
    std::vector<std::vector<double>> values(static_cast<std::size_t>(n_contexts));
    for (auto& row : values) {
      row.resize(static_cast<std::size_t>(n_actions));
      for (auto& v : row) v = rng.next_double();
    }
    inst.fclass.push_back(RewardFunction::tabular(std::move(values)));
  }
  inst.f_star_index = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(class_size));

  inst.lambda = pick_lambda(rng);
  const double eps_options[] = {0.5, 1.0, 2.0, 4.0};
  inst.epsilon = eps_options[rng.next_u64() % 4];
  for (int t = 0; t < T; ++t) {
    inst.points.emplace_back(static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n_contexts)),
                             static_cast<std::int64_t>(rng.next_u64() %
                                                       static_cast<std::uint64_t>(n_actions)));
    inst.betas.push_back(inst.epsilon * (1.0 - rng.next_double()));
  }
  return inst;
}

namespace {

std::string describe_instance(const GdcInstance& inst, double value, double bound) {
  std::ostringstream oss;
  oss << "|F|=" << inst.fclass.size() << " T=" << inst.points.size() << " lambda=" << inst.lambda
      << " epsilon=" << inst.epsilon << " value=" << value << " bound=" << bound;
  return oss.str();
}

}  // namespace

CheckReport check_linear_dc_bound(int n_instances, std::uint64_t seed) {
  CheckReport report;
  report.checker = "gdc-linear-bound";
  report.instances = n_instances;
  const auto grid = default_gamma_grid();
  for (int k = 0; k < n_instances; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k), 0, 100);
    const GdcInstance inst = random_linear_gdc_instance(rng);
    const double value = min_gdc_bruteforce(inst, grid);
    const double d = inst.actions->dim();
    const double T = static_cast<double>(inst.points.size());
    const double bound = 2.0 * d * std::log(1.0 + inst.epsilon * T / (d * inst.lambda));
    if (bound > 0.0) report.max_ratio = std::max(report.max_ratio, value / bound);
    if (value > bound + 1e-9) {
      ++report.failures;
      if (report.witness.empty()) report.witness = describe_instance(inst, value, bound);
    }
  }
  report.holds = report.failures == 0;
  return report;
}

CheckReport check_dc_vs_eluder(int n_instances, std::uint64_t seed) {
  CheckReport report;
  report.checker = "gdc-vs-eluder";
  report.instances = n_instances;
  const auto grid = default_gamma_grid();
  for (int k = 0; k < n_instances; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k), 0, 101);
    const GdcInstance inst = random_tabular_gdc_instance(rng);
    const double value = min_gdc_bruteforce(inst, grid);
    const double dim = gen_eluder_dim(inst);
    if (dim > 1e-12) report.max_ratio = std::max(report.max_ratio, value / dim);
    if (value > dim + 1e-9) {
      ++report.failures;
      if (report.witness.empty()) report.witness = describe_instance(inst, value, dim);
    }
  }
  report.holds = report.failures == 0;
  return report;
}

CheckReport run_variance_sum_sweep(int n_instances, std::uint64_t seed) {
  CheckReport report;
  report.checker = "variance-sum";
  report.instances = n_instances;
  for (int k = 0; k < n_instances; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k), 0, 102);
    const int len = 1 + static_cast<int>(rng.next_u64() % 1000);
    std::vector<double> bars(static_cast<std::size_t>(len));
    for (auto& b : bars) b = std::exp(rng.next_gaussian());  // lognormal, positive
    const auto check = check_variance_sum_lemma(bars);
    report.max_ratio = std::max(report.max_ratio, check.lhs / check.rhs);
    if (!check.holds) {
      ++report.failures;
      if (report.witness.empty()) {
        std::ostringstream oss;
        oss << "length=" << len << " lhs=" << check.lhs << " rhs=" << check.rhs;
        report.witness = oss.str();
      }
    }
  }
  report.holds = report.failures == 0;
  return report;
}

CheckReport run_elliptical_sweep(int n_instances, std::uint64_t seed) {
  CheckReport report;
  report.checker = "elliptical-potential";
  report.instances = n_instances;
  for (int k = 0; k < n_instances; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k), 0, 103);
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    const int T = 1 + static_cast<int>(rng.next_u64() % 50);
    const double eps_options[] = {0.5, 1.0, 2.0, 4.0};
    const double epsilon = eps_options[rng.next_u64() % 4];
    const double lambda = pick_lambda(rng);
    std::vector<Eigen::VectorXd> feats;
    std::vector<double> betas;
    for (int t = 0; t < T; ++t) {
      feats.push_back(ball_point(rng, d));
      betas.push_back(epsilon * (1.0 - rng.next_double()));
    }
    const auto check = elliptical_potential_check(feats, betas, lambda, epsilon);
    if (check.bound > 0.0) report.max_ratio = std::max(report.max_ratio, check.lhs / check.bound);
    if (!check.holds) {
      ++report.failures;
      if (report.witness.empty()) {
        std::ostringstream oss;
        oss << "d=" << d << " T=" << T << " lambda=" << lambda << " epsilon=" << epsilon
            << " lhs=" << check.lhs << " logdet=" << check.logdet_bound
            << " bound=" << check.bound;
        report.witness = oss.str();
      }
    }
  }
  report.holds = report.failures == 0;
  return report;
}

MgfReport empirical_mgf_check(const std::function<double()>& gen, double declared_norm,
                              const std::vector<double>& lambda_grid, int n_samples,
                              MgfConvention convention) {
  if (n_samples < 100000) throw std::invalid_argument("empirical_mgf_check: need >= 1e5 samples");
  std::vector<double> eps(static_cast<std::size_t>(n_samples));
  for (auto& e : eps) e = gen();

  const double denom = convention == MgfConvention::EighthBound ? 8.0 : 2.0;
  MgfReport report;
  report.holds = true;
  for (double lambda : lambda_grid) {
    MgfPoint pt;
    pt.lambda = lambda;
    pt.bound = declared_norm * lambda * lambda / denom;
    double mean = 0.0;
    for (double e : eps) mean += std::exp(lambda * e);
    mean /= n_samples;
    double var = 0.0;
    for (double e : eps) {
      const double dlt = std::exp(lambda * e) - mean;
      var += dlt * dlt;
    }
    var /= (n_samples - 1);
    if (!std::isfinite(mean) || mean <= 0.0) {
      pt.in_range = false;
      report.points.push_back(pt);
      continue;
    }
    pt.log_mgf = std::log(mean);
    pt.slack = 3.0 * std::sqrt(var / n_samples) / mean;  // delta method on log
    pt.ok = pt.log_mgf <= pt.bound + pt.slack;
    if (!pt.ok) report.holds = false;
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace fgtsva
