#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgtsva/agents.hpp"
#include "fgtsva/environments.hpp"

namespace fgtsva {

struct AgentConfig {
  std::string name;  // unique display name; selects the algorithm unless algo is set
  std::string algo;  // fgtsva | fgtsva-discrete | fgts-a | weighted-oful | oracle
  // fgtsva / fgtsva-discrete / fgts-a
  std::optional<double> c;      // default 0.003; fgtsva-discrete defaults to the
                                // 2*sqrt(log|F|/dc) prescription
  std::optional<double> alpha;  // default 1/sqrt(T)
  int K = 20;
  double delta0 = 0.1;
  double eta = 1.0;
  double lambda0 = 1.0;
  // weighted-oful
  double nu = 1.0;
  double delta_conf = 0.01;
  double lambda_reg = 1.0;
  // fgtsva-discrete: class of theta_star plus (class_size - 1) random unit vectors
  int class_size = 16;
};

struct ExperimentConfig {
  int d = 5;
  int T = 2000;
  int runs = 100;
  std::uint64_t seed = 1;
  NoiseSchedule noise = NoiseSchedule::sparse(0.1);
  std::vector<AgentConfig> agents;
};

// Carries every validation message at once.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

ExperimentConfig load_config(const std::string& path);  // throws ConfigError
ExperimentConfig parse_config(const std::string& json_text);

// Stream id derived from the policy parameters (not the display name), so two
// agents with identical policies draw identical randomness and their paired
// traces coincide. Top bit set; never collides with environment streams.
std::uint32_t policy_stream_id(const AgentConfig& a);

std::unique_ptr<Agent> make_agent(const AgentConfig& a, const ExperimentConfig& cfg,
                                  const LinearEnv& env, std::uint64_t run_id);

struct RunResult {
  std::string agent;
  int run_id = 0;
  std::vector<double> cum_regret;  // length T, nondecreasing
  std::vector<double> sigma_sq;    // length T
};

struct AggregateRow {
  std::string agent;
  int t = 0;  // 1-based round
  double mean_cum_regret = 0.0;
  double stderr_cum_regret = 0.0;
};

struct BatchResult {
  std::vector<std::string> agent_names;  // config order
  int runs = 0;
  std::vector<RunResult> raw;  // indexed run-major: run * n_agents + agent
  std::vector<AggregateRow> aggregate;

  const RunResult& result(int run, int agent_index) const {
    return raw[static_cast<std::size_t>(run) * agent_names.size() +
               static_cast<std::size_t>(agent_index)];
  }
};

RunResult run_episode(LinearEnv& env, Agent& agent, std::uint64_t seed, std::uint64_t run_id,
                      std::uint32_t agent_stream, const std::string& name);

// runs x agents episodes, parallel across (run, agent); the output is a pure
// function of (config, seed) whatever the parallelism.
BatchResult run_batch(const ExperimentConfig& cfg, int parallel);

std::string csv_raw(const BatchResult& batch);
std::string csv_aggregate(const BatchResult& batch);
void emit_csv_raw(const BatchResult& batch, const std::string& path);
void emit_csv_aggregate(const BatchResult& batch, const std::string& path);

// Self-contained SVG: mean cumulative regret per agent with translucent
// standard-error bands, legend and axes.
std::string render_svg(const BatchResult& batch);
void emit_plot(const BatchResult& batch, const std::string& path);

int cli_main(int argc, const char* const* argv);

}  // namespace fgtsva
