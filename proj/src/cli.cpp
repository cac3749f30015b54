#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fgtsva/diagnostics.hpp"
#include "fgtsva/harness.hpp"

namespace fgtsva {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json report_to_json(const CheckReport& r) {
  ordered_json j;
  j["checker"] = r.checker;
  j["instances"] = r.instances;
  j["failures"] = r.failures;
  j["max_ratio"] = r.max_ratio;
  j["holds"] = r.holds;
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

// The MGF diagnostic demonstrates the convention gap: a standard normal passes
// at declared norm 4 under the l^2/8 bound and must fail at declared norm 1.
ordered_json mgf_report_json(std::uint64_t seed, int n_samples, int& failures) {
  const std::vector<double> grid = {-1.0, -0.5, 0.5, 1.0};
  auto normal_gen = [seed]() {
    auto rng = std::make_shared<RngStream>(seed, 0, 0, 104);
    return [rng]() { return rng->next_gaussian(); };
  }();
  auto zero_gen = []() { return 0.0; };

  const MgfReport pass4 = empirical_mgf_check(normal_gen, 4.0, grid, n_samples,
                                              MgfConvention::EighthBound);
  const MgfReport fail1 = empirical_mgf_check(normal_gen, 1.0, grid, n_samples,
                                              MgfConvention::EighthBound);
  const MgfReport zero = empirical_mgf_check(zero_gen, 0.0, grid, n_samples,
                                             MgfConvention::EighthBound);

  failures = 0;
  if (!pass4.holds) ++failures;
  if (fail1.holds) ++failures;  // expected to violate the bound
  if (!zero.holds) ++failures;

  double max_ratio = 0.0;
  ordered_json points = ordered_json::array();
  for (const auto& pt : pass4.points) {
    if (pt.in_range && pt.bound > 0.0) max_ratio = std::max(max_ratio, pt.log_mgf / pt.bound);
    points.push_back({{"lambda", pt.lambda},
                      {"log_mgf", pt.log_mgf},
                      {"bound", pt.bound},
                      {"slack", pt.slack},
                      {"ok", pt.ok}});
  }

  ordered_json j;
  j["checker"] = "mgf";
  j["instances"] = 3;
  j["failures"] = failures;
  j["max_ratio"] = max_ratio;
  j["holds"] = failures == 0;
  j["cases"] = {{"normal_declared_4_eighth", pass4.holds},
                {"normal_declared_1_eighth", fail1.holds},
                {"zero_noise", zero.holds}};
  j["normal_declared_4_points"] = points;
  return j;
}

void print_final_summary(const BatchResult& batch) {
  const int T = batch.aggregate.empty() ? 0 : batch.aggregate.back().t;
  std::printf("%-24s %16s %12s\n", "agent", "final mean regret", "stderr");
  for (const auto& row : batch.aggregate)
    if (row.t == T)
      std::printf("%-24s %16.4f %12.4f\n", row.agent.c_str(), row.mean_cum_regret,
                  row.stderr_cum_regret);
}

int cmd_run(const std::string& config_path, const std::string& out,
            const std::string& raw_out, const std::string& plot,
            std::optional<std::uint64_t> seed, std::optional<int> runs, int parallel,
            bool quiet) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (runs) cfg.runs = *runs;
  const BatchResult batch = run_batch(cfg, parallel);
  if (!out.empty()) emit_csv_aggregate(batch, out);
  if (!raw_out.empty()) emit_csv_raw(batch, raw_out);
  if (!plot.empty()) emit_plot(batch, plot);
  if (!quiet) print_final_summary(batch);
  return 0;
}

int cmd_diag(const std::string& checker, int instances, std::uint64_t seed) {
  ordered_json j;
  bool holds = false;
  if (checker == "variance-sum") {
    const auto r = run_variance_sum_sweep(instances, seed);
    j = report_to_json(r);
    holds = r.holds;
  } else if (checker == "elliptical") {
    const auto r = run_elliptical_sweep(instances, seed);
    j = report_to_json(r);
    holds = r.holds;
  } else if (checker == "gdc") {
    const auto r = check_linear_dc_bound(instances, seed);
    j = report_to_json(r);
    holds = r.holds;
  } else if (checker == "eluder") {
    const auto r = check_dc_vs_eluder(instances, seed);
    j = report_to_json(r);
    holds = r.holds;
  } else if (checker == "mgf") {
    int failures = 0;
    j = mgf_report_json(seed, 100000, failures);
    holds = failures == 0;
  } else {
    std::cerr << "unknown checker '" << checker
              << "' (expected variance-sum|elliptical|gdc|eluder|mgf)\n";
    return 1;
  }
  std::cout << j.dump(2) << "\n";
  return holds ? 0 : 2;
}

int cmd_sweep(const std::string& param, const std::string& values_csv,
              const std::string& config_path, const std::string& out,
              std::optional<std::uint64_t> seed, std::optional<int> runs, int parallel) {
  if (param != "c") {
    std::cerr << "sweep: only --param c is supported\n";
    return 1;
  }
  std::vector<double> values;
  std::stringstream ss(values_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      values.push_back(std::stod(tok));
    } catch (...) {
      std::cerr << "sweep: cannot parse value '" << tok << "'\n";
      return 1;
    }
  }
  if (values.empty()) {
    std::cerr << "sweep: no values given\n";
    return 1;
  }

  ExperimentConfig base = load_config(config_path);
  if (seed) base.seed = *seed;
  if (runs) base.runs = *runs;
  bool has_target = false;
  for (const auto& a : base.agents)
    if (a.algo == "fgtsva" || a.algo == "fgtsva-discrete") has_target = true;
  if (!has_target) throw ConfigError({"sweep: config has no fgtsva agent to vary c on"});

  std::string csv = "param,value,agent,t,mean_cum_regret,stderr\n";
  char buf[64];
  for (double v : values) {
    ExperimentConfig cfg = base;
    for (auto& a : cfg.agents)
      if (a.algo == "fgtsva" || a.algo == "fgtsva-discrete") a.c = v;
    const BatchResult batch = run_batch(cfg, parallel);
    for (const auto& row : batch.aggregate) {
      std::snprintf(buf, sizeof(buf), "c,%.17g,", v);
      csv += buf;
      csv += row.agent + "," + std::to_string(row.t) + ",";
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", row.mean_cum_regret,
                    row.stderr_cum_regret);
      csv += buf;
    }
    std::printf("c = %g\n", v);
    print_final_summary(batch);
  }
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write to '" + out + "'");
    f << csv;
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Variance-aware feel-good Thompson sampling: simulation and diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out, raw_out, plot;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> runs_override;
  int parallel = static_cast<int>(std::thread::hardware_concurrency());
  if (parallel < 1) parallel = 1;

  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a batch experiment from a JSON config");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out, "aggregate CSV output path");
  run->add_option("--raw-out", raw_out, "raw per-run CSV output path");
  run->add_option("--plot", plot, "SVG plot output path");
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--runs", runs_override, "override the number of runs");
  run->add_option("--parallel", parallel, "worker threads");
  run->add_flag("--quiet", quiet, "suppress the final summary table");

  std::string checker;
  int instances = -1;
  std::uint64_t diag_seed = 1;
  auto* diag = app.add_subcommand("diag", "Run a numerical verifier, print a JSON report");
  diag->add_option("checker", checker, "variance-sum|elliptical|gdc|eluder|mgf")->required();
  diag->add_option("--instances", instances, "number of random instances");
  diag->add_option("--seed", diag_seed, "sweep seed");

  std::string param = "c", values_csv;
  auto* sweep = app.add_subcommand("sweep", "Ablation over a parameter");
  sweep->add_option("--param", param, "parameter to sweep (only 'c')");
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--config", config_path, "JSON experiment config")->required();
  sweep->add_option("--out", out, "CSV output path");
  sweep->add_option("--seed", seed_override, "override the config seed");
  sweep->add_option("--runs", runs_override, "override the number of runs");
  sweep->add_option("--parallel", parallel, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out, raw_out, plot, seed_override, runs_override, parallel,
                     quiet);
    if (diag->parsed()) {
      if (instances == 0 || instances < -1) {
        std::cerr << "diag: --instances must be >= 1\n";
        return 1;
      }
      if (instances < 0) instances = (checker == "gdc" || checker == "eluder") ? 200 : 1000;
      return cmd_diag(checker, instances, diag_seed);
    }
    if (sweep->parsed())
      return cmd_sweep(param, values_csv, config_path, out, seed_override, runs_override,
                       parallel);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fgtsva
