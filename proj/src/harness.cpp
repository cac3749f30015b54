#include "fgtsva/harness.hpp"

#include "fgtsva/baselines.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace fgtsva {

using json = nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "config errors:";
  for (const auto& e : errors) out += "\n  - " + e;
  return out;
}

// Shortest round-trip decimal form; keeps CSV/SVG output byte-stable.
std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>& errors) {
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) errors.push_back(where + ": unknown key '" + key + "'");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

namespace {

NoiseSchedule parse_noise(const json& j, std::vector<std::string>& errors) {
  NoiseSchedule noise = NoiseSchedule::deterministic();
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    errors.push_back("env.noise: expected an object with a 'kind' string");
    return noise;
  }
  const std::string kind = j["kind"];
  if (kind == "sparse") {
    reject_unknown_keys(j, {"kind", "p"}, "env.noise", errors);
    const double p = j.value("p", -1.0);
    if (p < 0.0 || p > 1.0)
      errors.push_back("env.noise: sparse needs p in [0, 1]");
    else
      noise = NoiseSchedule::sparse(p);
  } else if (kind == "dense") {
    reject_unknown_keys(j, {"kind"}, "env.noise", errors);
    noise = NoiseSchedule::dense();
  } else if (kind == "deterministic") {
    reject_unknown_keys(j, {"kind"}, "env.noise", errors);
    noise = NoiseSchedule::deterministic();
  } else if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "v"}, "env.noise", errors);
    const double v = j.value("v", -1.0);
    if (v < 0.0)
      errors.push_back("env.noise: constant needs v >= 0");
    else
      noise = NoiseSchedule::constant(v);
  } else {
    errors.push_back("env.noise: unknown kind '" + kind + "'");
  }
  return noise;
}

AgentConfig parse_agent(const json& j, std::size_t index, std::vector<std::string>& errors) {
  AgentConfig a;
  const std::string where = "agents[" + std::to_string(index) + "]";
  if (!j.is_object()) {
    errors.push_back(where + ": expected an object");
    return a;
  }
  a.name = j.value("name", "");
  if (a.name.empty()) errors.push_back(where + ": missing 'name'");
  a.algo = j.value("algo", a.name);

  static const std::set<std::string> common = {"name", "algo"};
  if (a.algo == "fgtsva" || a.algo == "fgtsva-discrete") {
    std::set<std::string> known = common;
    known.insert({"c", "alpha", "K", "delta0"});
    if (a.algo == "fgtsva-discrete") known.insert("class_size");
    reject_unknown_keys(j, known, where, errors);
    if (j.contains("c")) a.c = j["c"].get<double>();
    if (j.contains("alpha")) a.alpha = j["alpha"].get<double>();
    a.K = j.value("K", 20);
    a.delta0 = j.value("delta0", 0.1);
    a.class_size = j.value("class_size", 16);
    if (a.c && *a.c < 0.0) errors.push_back(where + ": c must be >= 0");
    if (a.alpha && *a.alpha <= 0.0) errors.push_back(where + ": alpha must be > 0");
    if (a.K < 1) errors.push_back(where + ": K must be >= 1");
    if (a.delta0 <= 0.0) errors.push_back(where + ": delta0 must be > 0");
    if (a.class_size < 1) errors.push_back(where + ": class_size must be >= 1");
  } else if (a.algo == "fgts-a") {
    std::set<std::string> known = common;
    known.insert({"eta", "lambda0", "K", "delta0"});
    reject_unknown_keys(j, known, where, errors);
    a.eta = j.value("eta", 1.0);
    a.lambda0 = j.value("lambda0", 1.0);
    a.K = j.value("K", 20);
    a.delta0 = j.value("delta0", 0.1);
    if (a.eta <= 0.0) errors.push_back(where + ": eta must be > 0");
    if (a.lambda0 < 0.0) errors.push_back(where + ": lambda0 must be >= 0");
    if (a.K < 1) errors.push_back(where + ": K must be >= 1");
    if (a.delta0 <= 0.0) errors.push_back(where + ": delta0 must be > 0");
  } else if (a.algo == "weighted-oful") {
    std::set<std::string> known = common;
    known.insert({"nu", "delta_conf", "lambda_reg", "alpha"});
    reject_unknown_keys(j, known, where, errors);
    a.nu = j.value("nu", 1.0);
    a.delta_conf = j.value("delta_conf", 0.01);
    a.lambda_reg = j.value("lambda_reg", 1.0);
    if (j.contains("alpha")) a.alpha = j["alpha"].get<double>();
    if (a.nu < 0.0) errors.push_back(where + ": nu must be >= 0");
    if (a.delta_conf <= 0.0 || a.delta_conf >= 1.0)
      errors.push_back(where + ": delta_conf must be in (0, 1)");
    if (a.lambda_reg <= 0.0) errors.push_back(where + ": lambda_reg must be > 0");
    if (a.alpha && *a.alpha <= 0.0) errors.push_back(where + ": alpha must be > 0");
  } else if (a.algo == "oracle") {
    reject_unknown_keys(j, common, where, errors);
  } else {
    errors.push_back(where + ": unknown algorithm '" + a.algo + "'");
  }
  return a;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  std::vector<std::string> errors;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("invalid JSON: ") + e.what()});
  }

  ExperimentConfig cfg;
  try {
  reject_unknown_keys(j, {"d", "T", "runs", "seed", "env", "agents"}, "config", errors);
  cfg.d = j.value("d", 5);
  cfg.T = j.value("T", 2000);
  cfg.runs = j.value("runs", 100);
  cfg.seed = j.value("seed", std::uint64_t{1});
  if (cfg.d < 1) errors.push_back("d must be >= 1");
  if (cfg.d > 62) errors.push_back("d must be <= 62");
  if (cfg.T < 1) errors.push_back("T must be >= 1");
  if (cfg.runs < 1) errors.push_back("runs must be >= 1");

  if (j.contains("env")) {
    if (!j["env"].is_object() || !j["env"].contains("noise")) {
      errors.push_back("env: expected an object with a 'noise' entry");
    } else {
      reject_unknown_keys(j["env"], {"noise"}, "env", errors);
      cfg.noise = parse_noise(j["env"]["noise"], errors);
    }
  } else {
    errors.push_back("missing 'env'");
  }

  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty()) {
    errors.push_back("agents: expected a nonempty array");
  } else {
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
      AgentConfig a = parse_agent(j["agents"][i], i, errors);
      if (!a.name.empty() && !names.insert(a.name).second)
        errors.push_back("agents[" + std::to_string(i) + "]: duplicate name '" + a.name + "'");
      if (a.algo == "weighted-oful" && cfg.d > 12)
        errors.push_back("agents[" + std::to_string(i) +
                         "]: weighted-oful enumerates the hypercube, needs d <= 12");
      cfg.agents.push_back(std::move(a));
    }
  }
  } catch (const json::exception& e) {
    errors.push_back(std::string("malformed value: ") + e.what());
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint32_t policy_stream_id(const AgentConfig& a) {
  std::string canon = a.algo;
  auto add = [&canon](const std::string& key, double v) {
    canon += "|" + key + "=" + fmt(v);
  };
  if (a.algo == "fgtsva" || a.algo == "fgtsva-discrete") {
    // c is deliberately left out: arms of a c-ablation share their sampler
    // noise (common random numbers), isolating the feel-good drift.
    add("alpha", a.alpha.value_or(-1.0));
    add("K", a.K);
    add("delta0", a.delta0);
    if (a.algo == "fgtsva-discrete") add("class_size", a.class_size);
  } else if (a.algo == "fgts-a") {
    add("eta", a.eta);
    add("lambda0", a.lambda0);
    add("K", a.K);
    add("delta0", a.delta0);
  } else if (a.algo == "weighted-oful") {
    add("nu", a.nu);
    add("delta_conf", a.delta_conf);
    add("lambda_reg", a.lambda_reg);
    add("alpha", a.alpha.value_or(-1.0));
  }
  // FNV-1a
  std::uint32_t h = 2166136261u;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 16777619u;
  }
  return h | stream::agent_flag;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& a, const ExperimentConfig& cfg,
                                  const LinearEnv& env, std::uint64_t run_id) {
  const double alpha = a.alpha.value_or(1.0 / std::sqrt(static_cast<double>(cfg.T)));
  if (a.algo == "fgtsva") {
    return std::make_unique<FgtsVaLinearAgent>(cfg.d, a.c.value_or(0.003), alpha,
                                               SgldOptions{a.K, a.delta0});
  }
  if (a.algo == "fgtsva-discrete") {
    std::vector<RewardFunction> fclass;
    fclass.push_back(env.f_star());
    RngStream rng(cfg.seed, run_id, 0, policy_stream_id(a));
    for (int i = 1; i < a.class_size; ++i)
      fclass.push_back(RewardFunction::linear(sample_theta_star(rng, cfg.d)));
    double c;
    if (a.c) {
      c = *a.c;
    } else {
      const double dd = static_cast<double>(cfg.d);
      FunctionClassMeta meta;
      meta.log_cardinality = std::log(static_cast<double>(a.class_size));
      meta.dc_estimate =
          2.0 * dd * std::log(1.0 + static_cast<double>(cfg.T) / (alpha * alpha * dd));
      c = default_hyperparams(cfg.T, meta).c;
    }
    return std::make_unique<FgtsVaDiscreteAgent>(std::move(fclass), c, alpha);
  }
  if (a.algo == "fgts-a") {
    FgtsTypeAOptions opt;
    opt.eta = a.eta;
    opt.lambda0 = a.lambda0;
    opt.sgld = SgldOptions{a.K, a.delta0};
    return std::make_unique<FgtsTypeAAgent>(cfg.d, cfg.T, opt);
  }
  if (a.algo == "weighted-oful") {
    return std::make_unique<WeightedOfulAgent>(
        cfg.d, cfg.T, alpha, WeightedOfulOptions{a.nu, a.delta_conf, a.lambda_reg});
  }
  if (a.algo == "oracle") return std::make_unique<OracleAgent>(env.f_star());
  throw std::invalid_argument("make_agent: unknown algorithm '" + a.algo + "'");
}

RunResult run_episode(LinearEnv& env, Agent& agent, std::uint64_t seed, std::uint64_t run_id,
                      std::uint32_t agent_stream, const std::string& name) {
  RunResult res;
  res.agent = name;
  res.run_id = static_cast<int>(run_id);
  const int T = env.horizon();
  res.cum_regret.reserve(static_cast<std::size_t>(T));
  res.sigma_sq.reserve(static_cast<std::size_t>(T));
  double cum = 0.0;
  for (int t = 1; t <= T; ++t) {
    const auto start = env.begin_round(t);
    RngStream rng(seed, run_id, static_cast<std::uint64_t>(t), agent_stream);
    RoundInputs in{t, start.context_id, env.actions(), start.sigma_sq};
    const ActionChoice choice = agent.act(in, rng);
    const double reward = env.step(t, choice);
    agent.observe(reward);
    cum += regret_increment(env.f_star(), env.actions(), choice, start.context_id);
    res.cum_regret.push_back(cum);
    res.sigma_sq.push_back(start.sigma_sq);
  }
  return res;
}

BatchResult run_batch(const ExperimentConfig& cfg, int parallel) {
  BatchResult batch;
  batch.runs = cfg.runs;
  for (const auto& a : cfg.agents) batch.agent_names.push_back(a.name);
  const int n_agents = static_cast<int>(cfg.agents.size());
  const int n_episodes = cfg.runs * n_agents;
  batch.raw.resize(static_cast<std::size_t>(n_episodes));

  std::vector<std::uint32_t> streams;
  for (const auto& a : cfg.agents) streams.push_back(policy_stream_id(a));

  auto run_one = [&](int e) {
    const int run_id = e / n_agents;
    const int agent_index = e % n_agents;
    LinearEnv env = LinearEnv::make(cfg.d, cfg.noise, cfg.T, cfg.seed,
                                    static_cast<std::uint64_t>(run_id));
    const auto& acfg = cfg.agents[static_cast<std::size_t>(agent_index)];
    auto agent = make_agent(acfg, cfg, env, static_cast<std::uint64_t>(run_id));
    batch.raw[static_cast<std::size_t>(e)] =
        run_episode(env, *agent, cfg.seed, static_cast<std::uint64_t>(run_id),
                    streams[static_cast<std::size_t>(agent_index)], acfg.name);
  };

  if (parallel <= 1) {
    for (int e = 0; e < n_episodes; ++e) run_one(e);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    const int n_workers = std::min(parallel, n_episodes);
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
      workers.emplace_back([&] {
        for (int e = next.fetch_add(1); e < n_episodes; e = next.fetch_add(1)) {
          try {
            run_one(e);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    for (auto& th : workers) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Aggregation is a deterministic fold in canonical (agent, run, t) order.
  for (int a = 0; a < n_agents; ++a) {
    for (int t = 0; t < cfg.T; ++t) {
      double mean = 0.0;
      for (int r = 0; r < cfg.runs; ++r) mean += batch.result(r, a).cum_regret[static_cast<std::size_t>(t)];
      mean /= cfg.runs;
      double se = 0.0;
      if (cfg.runs > 1) {
        double ss = 0.0;
        for (int r = 0; r < cfg.runs; ++r) {
          const double dlt = batch.result(r, a).cum_regret[static_cast<std::size_t>(t)] - mean;
          ss += dlt * dlt;
        }
        se = std::sqrt(ss / (cfg.runs - 1)) / std::sqrt(static_cast<double>(cfg.runs));
      }
      batch.aggregate.push_back(
          {batch.agent_names[static_cast<std::size_t>(a)], t + 1, mean, se});
    }
  }
  return batch;
}

std::string csv_raw(const BatchResult& batch) {
  std::string out = "agent,run_id,t,cum_regret,sigma_sq\n";
  const int n_agents = static_cast<int>(batch.agent_names.size());
  for (int a = 0; a < n_agents; ++a)
    for (int r = 0; r < batch.runs; ++r) {
      const RunResult& res = batch.result(r, a);
      for (std::size_t t = 0; t < res.cum_regret.size(); ++t) {
        out += res.agent;
        out += ',';
        out += std::to_string(res.run_id);
        out += ',';
        out += std::to_string(t + 1);
        out += ',';
        out += fmt(res.cum_regret[t]);
        out += ',';
        out += fmt(res.sigma_sq[t]);
        out += '\n';
      }
    }
  return out;
}

std::string csv_aggregate(const BatchResult& batch) {
  std::string out = "agent,t,mean_cum_regret,stderr\n";
  for (const auto& row : batch.aggregate) {
    out += row.agent;
    out += ',';
    out += std::to_string(row.t);
    out += ',';
    out += fmt(row.mean_cum_regret);
    out += ',';
    out += fmt(row.stderr_cum_regret);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write to '" + path + "'");
  out << content;
}

}  // namespace

void emit_csv_raw(const BatchResult& batch, const std::string& path) {
  write_file(path, csv_raw(batch));
}

void emit_csv_aggregate(const BatchResult& batch, const std::string& path) {
  write_file(path, csv_aggregate(batch));
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[i % 8];
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string render_svg(const BatchResult& batch) {
  if (batch.aggregate.empty()) throw std::invalid_argument("render_svg: empty aggregate");
  const double width = 800, height = 500;
  const double left = 70, right = 20, top = 20, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  int T = 0;
  double ymax = 0.0;
  for (const auto& row : batch.aggregate) {
    T = std::max(T, row.t);
    ymax = std::max(ymax, row.mean_cum_regret + row.stderr_cum_regret);
  }
  if (ymax <= 0.0) ymax = 1.0;
  const auto x_of = [&](double t) { return left + pw * t / T; };
  const auto y_of = [&](double v) { return top + ph * (1.0 - v / ymax); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // axes and ticks
  svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double tv = T * k / 5.0;
    const double x = x_of(tv);
    svg << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << top + ph + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(tv) << "</text>\n";
    const double yv = ymax * k / 5.0;
    const double y = y_of(yv);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(yv) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"14\" text-anchor=\"middle\">round</text>\n";
  svg << "<text x=\"18\" y=\"" << top + ph / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">cumulative regret</text>\n";

  for (std::size_t a = 0; a < batch.agent_names.size(); ++a) {
    const auto& name = batch.agent_names[a];
    std::vector<const AggregateRow*> rows;
    for (const auto& row : batch.aggregate)
      if (row.agent == name) rows.push_back(&row);

    // error band: upper edge forward, lower edge back
    std::ostringstream band;
    for (const auto* row : rows)
      band << x_of(row->t) << "," << y_of(row->mean_cum_regret + row->stderr_cum_regret) << " ";
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      band << x_of((*it)->t) << "," << y_of((*it)->mean_cum_regret - (*it)->stderr_cum_regret)
           << " ";
    svg << "<polygon points=\"" << band.str() << "\" fill=\"" << palette(a)
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";

    std::ostringstream line;
    for (const auto* row : rows) line << x_of(row->t) << "," << y_of(row->mean_cum_regret) << " ";
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << palette(a)
        << "\" stroke-width=\"1.5\"/>\n";

    // legend entry
    const double ly = top + 16 + 18 * static_cast<double>(a);
    svg << "<line x1=\"" << left + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + 34 << "\" y2=\""
        << ly << "\" stroke=\"" << palette(a) << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << xml_escape(name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const BatchResult& batch, const std::string& path) {
  write_file(path, render_svg(batch));
}

}  // namespace fgtsva
