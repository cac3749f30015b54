// Acceptance suite: one criterion per function, one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fgtsva/baselines.hpp"
#include "fgtsva/diagnostics.hpp"
#include "fgtsva/harness.hpp"
#include "test_util.hpp"

using namespace fgtsva;

namespace {

int hw_threads() {
  const int n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 2;
}

std::vector<double> final_regrets(const BatchResult& batch, int agent_index) {
  std::vector<double> out;
  for (int r = 0; r < batch.runs; ++r)
    out.push_back(batch.result(r, agent_index).cum_regret.back());
  return out;
}

AgentConfig fgtsva_agent(const std::string& name, double c) {
  AgentConfig a;
  a.name = name;
  a.algo = "fgtsva";
  a.c = c;
  a.K = 20;
  a.delta0 = 0.1;
  return a;
}

ExperimentConfig comparison_config(NoiseSchedule noise) {
  ExperimentConfig cfg;
  cfg.d = 5;
  cfg.T = 2000;
  cfg.runs = 100;
  cfg.seed = 20240615;
  cfg.noise = noise;
  cfg.agents.push_back(fgtsva_agent("fgtsva", 0.003));
  AgentConfig fa;
  fa.name = "fgts-a";
  fa.algo = "fgts-a";
  cfg.agents.push_back(fa);
  AgentConfig of;
  of.name = "weighted-oful";
  of.algo = "weighted-oful";
  cfg.agents.push_back(of);
  return cfg;
}

// ---------------------------------------------------------------------------

bool exact_sampler_fidelity(std::string& detail) {
  RngStream setup(2001, 0, 0, 5);
  std::vector<RewardFunction> fclass;
  for (int i = 0; i < 4; ++i)
    fclass.push_back(RewardFunction::tabular({{setup.next_double(), setup.next_double()}}));
  const auto actions = ActionSet::explicit_set(
      {Eigen::VectorXd::Unit(2, 0), Eigen::VectorXd::Unit(2, 1)});
  Transcript tr;
  for (int t = 1; t <= 5; ++t) {
    const auto aid = static_cast<std::int64_t>(setup.next_u64() % 2);
    tr.append({t, 0, aid, Eigen::VectorXd::Unit(2, static_cast<int>(aid)), setup.next_double(),
               0.5 + setup.next_double()});
  }
  const auto w = discrete_posterior_weights(fclass, tr, 0.4, actions, 0,
                                            Eigen::VectorXd::Constant(4, 0.25));
  std::vector<int> counts(4, 0);
  RngStream rng(2002, 0, 0, 5);
  for (int k = 0; k < 10000; ++k) ++counts[static_cast<std::size_t>(categorical_sample(w, rng))];
  const double p =
      testutil::chi_square_pvalue(testutil::chi_square_stat(counts, {w[0], w[1], w[2], w[3]}), 3);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "chi-square p = %.4f", p);
  detail = buf;
  return p > 0.01;
}

bool gradient_correctness(std::string& detail) {
  RngStream rng(2003, 0, 0, 5);
  const int d = 5;
  const auto cube = ActionSet::hypercube(d);
  const auto cube_ptr = std::make_shared<const ActionSet>(cube);
  const double h = 1e-7;
  double worst = 0.0;
  for (int len : {0, 1, 50}) {
    Transcript tr;
    FeelGoodTranscript fg;
    for (int t = 1; t <= len; ++t) {
      Eigen::VectorXd phi(d);
      for (int j = 0; j < d; ++j) phi[j] = rng.next_gaussian();
      phi /= std::max(1.0, phi.norm());
      const double reward = rng.next_gaussian();
      const double w = 0.5 + 1.5 * rng.next_double();
      tr.append({t, 0, 0, phi, reward, w});
      fg.records.append({t, 0, 0, phi, reward, 1.0});
      fg.action_sets.push_back(cube_ptr);
    }
    const double lambda = 0.9, eta = 0.8, lambda_a = 0.5;
    int tested = 0;
    while (tested < 100) {
      Eigen::VectorXd theta(d);
      bool near_boundary = false;
      for (int j = 0; j < d; ++j) {
        theta[j] = rng.next_gaussian();
        if (std::abs(theta[j]) < 1e-6) near_boundary = true;
      }
      if (near_boundary) continue;
      ++tested;

      const auto gv = grad_log_posterior(theta, tr, lambda, cube);
      const auto ga = fgts_typeA_grad(theta, fg, eta, lambda_a);
      Eigen::VectorXd fdv(d), fda(d);
      for (int j = 0; j < d; ++j) {
        Eigen::VectorXd hi = theta, lo = theta;
        hi[j] += h;
        lo[j] -= h;
        fdv[j] = (log_posterior_unnorm(hi, tr, lambda, cube) -
                  log_posterior_unnorm(lo, tr, lambda, cube)) /
                 (2.0 * h);
        fda[j] = (fgts_typeA_log_posterior(hi, fg, eta, lambda_a) -
                  fgts_typeA_log_posterior(lo, fg, eta, lambda_a)) /
                 (2.0 * h);
      }
      worst = std::max(worst, (gv - fdv).norm() / std::max(1e-8, gv.norm()));
      worst = std::max(worst, (ga - fda).norm() / std::max(1e-8, ga.norm()));
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max rel err = %.2e", worst);
  detail = buf;
  return worst < 1e-5;
}

bool variance_sum_lemma(std::string& detail) {
  const auto report = run_variance_sum_sweep(1000, 2024);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d/%d hold, max lhs/rhs = %.4f",
                report.instances - report.failures, report.instances, report.max_ratio);
  detail = buf;
  return report.holds;
}

bool elliptical_lemma(std::string& detail) {
  const auto report = run_elliptical_sweep(1000, 2025);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d/%d hold, max lhs/bound = %.4f",
                report.instances - report.failures, report.instances, report.max_ratio);
  detail = buf;
  return report.holds;
}

bool linear_dc_bound(std::string& detail) {
  const auto report = check_linear_dc_bound(200, 2026);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d/%d hold, max dc/bound = %.4f",
                report.instances - report.failures, report.instances, report.max_ratio);
  detail = buf;
  return report.holds;
}

bool dc_vs_eluder(std::string& detail) {
  const auto report = check_dc_vs_eluder(200, 2027);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d/%d hold, max dc/dim = %.4f",
                report.instances - report.failures, report.instances, report.max_ratio);
  detail = buf;
  return report.holds;
}

bool noise_model_ordering(NoiseSchedule noise, std::string& detail) {
  const auto cfg = comparison_config(noise);
  const auto batch = run_batch(cfg, hw_threads());
  const auto va = final_regrets(batch, 0);
  const auto fa = final_regrets(batch, 1);
  const auto of = final_regrets(batch, 2);
  const auto t_fa = testutil::paired_t(fa, va);
  const auto t_of = testutil::paired_t(of, va);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean diff vs fgts-a = %.2f (t = %.1f), vs weighted-oful = %.2f (t = %.1f)",
                t_fa.mean, t_fa.t, t_of.mean, t_of.t);
  detail = buf;
  return t_fa.mean > 0.0 && t_of.mean > 0.0 && t_fa.t > testutil::t_crit_95_df99 &&
         t_of.t > testutil::t_crit_95_df99;
}

bool deterministic_plateau(std::string& detail) {
  ExperimentConfig cfg;
  cfg.d = 5;
  cfg.T = 500;
  cfg.runs = 100;
  cfg.seed = 20240616;
  cfg.noise = NoiseSchedule::deterministic();
  AgentConfig a;
  a.name = "fgtsva-discrete";
  a.algo = "fgtsva-discrete";
  a.class_size = 16;
  cfg.agents.push_back(a);
  const auto batch = run_batch(cfg, hw_threads());
  double total = 0.0, late = 0.0;
  for (int r = 0; r < cfg.runs; ++r) {
    const auto& trace = batch.result(r, 0).cum_regret;
    total += trace.back();
    late += trace.back() - trace[249];  // regret accrued over rounds 251..500
  }
  total /= cfg.runs;
  late /= cfg.runs;
  const double share = total > 0.0 ? late / total : 0.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "mean total = %.3f, late share = %.2f%%", total,
                100.0 * share);
  detail = buf;
  return share < 0.05;
}

bool ablation_shape(std::string& detail) {
  const std::vector<double> values = {0.0, 0.003, 0.01, 0.03};
  ExperimentConfig cfg;
  cfg.d = 5;
  cfg.T = 2000;
  cfg.runs = 100;
  cfg.seed = 20240617;
  cfg.noise = NoiseSchedule::sparse(0.1);
  for (double c : values) {
    std::ostringstream name;
    name << "c=" << c;
    cfg.agents.push_back(fgtsva_agent(name.str(), c));
  }
  const auto batch = run_batch(cfg, hw_threads());
  std::vector<std::vector<double>> finals;
  std::vector<double> means;
  for (std::size_t i = 0; i < values.size(); ++i) {
    finals.push_back(final_regrets(batch, static_cast<int>(i)));
    double m = 0.0;
    for (double v : finals.back()) m += v;
    means.push_back(m / static_cast<double>(finals.back().size()));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (means[i] < means[best]) best = i;
  const auto t = testutil::paired_t(finals[0], finals[best]);
  std::ostringstream oss;
  oss << "means:";
  for (std::size_t i = 0; i < values.size(); ++i) oss << " c=" << values[i] << ":" << means[i];
  char buf[64];
  std::snprintf(buf, sizeof(buf), "; best = c=%g, t(c0 - best) = %.2f", values[best], t.t);
  oss << buf;
  detail = oss.str();
  return best != 0 && t.t > testutil::t_crit_95_df99;
}

bool mgf_convention_gap(std::string& detail) {
  const std::vector<double> grid = {-1.0, -0.5, 0.5, 1.0};
  auto rng = std::make_shared<RngStream>(2028, 0, 0, 5);
  auto normal = [rng]() { return rng->next_gaussian(); };
  auto zero = []() { return 0.0; };
  const bool pass4 =
      empirical_mgf_check(normal, 4.0, grid, 100000, MgfConvention::EighthBound).holds;
  const bool fail1 =
      empirical_mgf_check(normal, 1.0, grid, 100000, MgfConvention::EighthBound).holds;
  const bool zero_ok =
      empirical_mgf_check(zero, 0.0, grid, 100000, MgfConvention::EighthBound).holds;
  std::ostringstream oss;
  oss << "normal@4 " << (pass4 ? "holds" : "violated") << ", normal@1 "
      << (fail1 ? "holds" : "violated") << ", zero " << (zero_ok ? "holds" : "violated");
  detail = oss.str();
  return pass4 && !fail1 && zero_ok;
}

bool determinism_across_parallelism(std::string& detail) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const auto cfg_path = (dir / "fgtsva_acc_cfg.json").string();
  {
    std::ofstream out(cfg_path);
    out << R"({"d": 4, "T": 60, "runs": 6, "seed": 77,
               "env": {"noise": {"kind": "sparse", "p": 0.2}},
               "agents": [{"name": "fgtsva", "c": 0.003},
                          {"name": "weighted-oful"},
                          {"name": "fgts-a"}]})";
  }
  const auto a_agg = (dir / "fgtsva_acc_a.csv").string();
  const auto a_raw = (dir / "fgtsva_acc_ar.csv").string();
  const auto b_agg = (dir / "fgtsva_acc_b.csv").string();
  const auto b_raw = (dir / "fgtsva_acc_br.csv").string();
  const char* argv1[] = {"fgtsva", "run", "--config", cfg_path.c_str(), "--out", a_agg.c_str(),
                         "--raw-out", a_raw.c_str(), "--parallel", "1", "--quiet"};
  const char* argv8[] = {"fgtsva", "run", "--config", cfg_path.c_str(), "--out", b_agg.c_str(),
                         "--raw-out", b_raw.c_str(), "--parallel", "8", "--quiet"};
  const int rc1 = cli_main(11, argv1);
  const int rc8 = cli_main(11, argv8);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const bool equal = slurp(a_agg) == slurp(b_agg) && slurp(a_raw) == slurp(b_raw) &&
                     !slurp(a_raw).empty();
  for (const auto& p : {cfg_path, a_agg, a_raw, b_agg, b_raw}) fs::remove(p);
  detail = equal ? "aggregate and raw CSV byte-identical" : "CSV outputs differ";
  return rc1 == 0 && rc8 == 0 && equal;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "exact-sampler fidelity", 1.0, exact_sampler_fidelity},
      {2, "gradient correctness", 5.0, gradient_correctness},
      {3, "variance-sum lemma sweep", 1.0, variance_sum_lemma},
      {4, "elliptical potential sweep", 30.0, elliptical_lemma},
      {5, "linear decoupling bound", 120.0, linear_dc_bound},
      {6, "decoupling vs Eluder dimension", 120.0, dc_vs_eluder},
      {7, "sparse-noise ordering",
       600.0, [](std::string& d) { return noise_model_ordering(NoiseSchedule::sparse(0.1), d); }},
      {8, "dense-noise ordering",
       600.0, [](std::string& d) { return noise_model_ordering(NoiseSchedule::dense(), d); }},
      {9, "deterministic-case plateau", 60.0, deterministic_plateau},
      {10, "ablation over c (sparse)", 600.0, ablation_shape},
      {11, "subgaussian MGF convention gap", 5.0, mgf_convention_gap},
      {12, "determinism across parallelism", 600.0, determinism_across_parallelism},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      ok = false;
      detail += " [over the runtime budget]";
    }
    std::printf("%s  %2d  %-34s %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures > 0 ? 1 : 0;
}
