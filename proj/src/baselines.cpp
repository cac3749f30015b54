#include "fgtsva/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace fgtsva {

WeightedRidgeState::WeightedRidgeState(int d, double lambda_reg)
    : sigma_(lambda_reg * Eigen::MatrixXd::Identity(d, d)),
      sigma_inv_(Eigen::MatrixXd::Identity(d, d) / lambda_reg),
      b_(Eigen::VectorXd::Zero(d)),
      theta_hat_(Eigen::VectorXd::Zero(d)),
      lambda_reg_(lambda_reg) {
  if (lambda_reg <= 0.0) throw std::invalid_argument("WeightedRidgeState: lambda_reg must be > 0");
}

void WeightedRidgeState::update(const Eigen::VectorXd& phi, double reward, double bar_sigma_sq) {
  if (bar_sigma_sq <= 0.0) throw std::invalid_argument("weighted_ridge_update: weight must be > 0");
  const double w = 1.0 / bar_sigma_sq;
  sigma_.noalias() += w * phi * phi.transpose();
  b_.noalias() += w * reward * phi;
  if (++updates_since_resolve_ >= 256) {
    resolve();
  } else {
    const Eigen::VectorXd u = sigma_inv_ * phi;
    sigma_inv_.noalias() -= (w / (1.0 + w * phi.dot(u))) * u * u.transpose();
    theta_hat_.noalias() = sigma_inv_ * b_;
  }
}

void WeightedRidgeState::resolve() {
  sigma_inv_ = sigma_.ldlt().solve(Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols()));
  theta_hat_.noalias() = sigma_inv_ * b_;
  updates_since_resolve_ = 0;
}

ActionChoice oful_select(const WeightedRidgeState& state, const ActionSet& actions, double beta) {
  if (beta < 0.0) throw std::invalid_argument("oful_select: beta must be >= 0");
  if (actions.is_hypercube() && actions.dim() > 12)
    throw std::invalid_argument("oful_select: hypercube enumeration capped at d = 12");
  ActionChoice best;
  for (std::int64_t i = 0; i < actions.size(); ++i) {
    const Eigen::VectorXd phi = actions.feature(i);
    const double ucb =
        state.theta_hat().dot(phi) + beta * std::sqrt(phi.dot(state.sigma_inv() * phi));
    if (i == 0 || ucb > best.value) {
      best.id = i;
      best.value = ucb;
      best.feature = phi;
    }
  }
  return best;
}

WeightedOfulAgent::WeightedOfulAgent(int d, int T, double alpha, WeightedOfulOptions opt)
    : state_(d, opt.lambda_reg), alpha_(alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("WeightedOfulAgent: alpha must be > 0");
  const double trace_cap = 1.0 + static_cast<double>(T) / (alpha * alpha * opt.lambda_reg);
  beta_ = opt.nu * std::sqrt(static_cast<double>(d) * std::log(trace_cap / opt.delta_conf)) +
          std::sqrt(opt.lambda_reg);
}

ActionChoice WeightedOfulAgent::act(const RoundInputs& in, RngStream&) {
  enter_act();
  const double bar = bar_sigma(in.sigma_sq, alpha_);
  ActionChoice choice = oful_select(state_, in.actions, beta_);
  pending_phi_ = choice.feature;
  pending_bar_sq_ = bar * bar;
  return choice;
}

void WeightedOfulAgent::observe(double reward) {
  enter_observe();
  state_.update(pending_phi_, reward, pending_bar_sq_);
}

namespace {

void check_feelgood_transcript(const FeelGoodTranscript& tr) {
  if (tr.action_sets.size() != static_cast<std::size_t>(tr.records.length()))
    throw std::invalid_argument("feel-good transcript: missing per-round action sets");
}

}  // namespace

double fgts_typeA_log_posterior(const Eigen::VectorXd& theta, const FeelGoodTranscript& transcript,
                                double eta, double lambda) {
  check_feelgood_transcript(transcript);
  const double d = static_cast<double>(theta.size());
  double v = -0.5 * d * theta.squaredNorm();
  for (int s = 0; s < transcript.records.length(); ++s) {
    const auto& rec = transcript.records.record(s);
    const double resid = rec.reward - theta.dot(rec.features);
    v -= eta * resid * resid;
    if (lambda != 0.0)
      v += lambda * argmax_linear(theta, *transcript.action_sets[static_cast<std::size_t>(s)]).value;
  }
  return v;
}

Eigen::VectorXd fgts_typeA_grad(const Eigen::VectorXd& theta, const FeelGoodTranscript& transcript,
                                double eta, double lambda) {
  check_feelgood_transcript(transcript);
  const double d = static_cast<double>(theta.size());
  Eigen::VectorXd g = -d * theta;
  for (int s = 0; s < transcript.records.length(); ++s) {
    const auto& rec = transcript.records.record(s);
    const double resid = rec.reward - theta.dot(rec.features);
    g.noalias() += (2.0 * eta * resid) * rec.features;
    if (lambda != 0.0)
      g.noalias() +=
          lambda * argmax_linear(theta, *transcript.action_sets[static_cast<std::size_t>(s)]).feature;
  }
  return g;
}

FgtsTypeAAgent::FgtsTypeAAgent(int d, int T, FgtsTypeAOptions opt)
    : stats_(d),
      opt_(opt),
      lambda_(opt.lambda0 / std::sqrt(static_cast<double>(T))),
      chain_(Eigen::VectorXd::Zero(d)) {
  if (opt_.eta <= 0.0) throw std::invalid_argument("FgtsTypeAAgent: eta must be > 0");
}

ActionChoice FgtsTypeAAgent::act(const RoundInputs& in, RngStream& rng) {
  enter_act();
  auto grad = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd g = stats_.grad(th, 0.0, in.actions);
    for (const auto& [set, count] : set_groups_)
      g.noalias() += (lambda_ * count) * argmax_linear(th, *set).feature;
    return g;
  };
  const SgldPreconditioner pre(stats_.gaussian_precision());
  sgld_sample_preconditioned(chain_, grad, pre, opt_.sgld.steps, opt_.sgld.delta0, rng);
  ActionChoice choice = argmax_linear(chain_, in.actions);
  pending_ = TranscriptRecord{in.t, in.context_id, choice.id, choice.feature, 0.0,
                              1.0 / opt_.eta};
  if (!pending_actions_ || last_actions_ != &in.actions) {
    pending_actions_ = std::make_shared<const ActionSet>(in.actions);
    last_actions_ = &in.actions;
  }
  return choice;
}

void FgtsTypeAAgent::observe(double reward) {
  enter_observe();
  pending_.reward = reward;
  stats_.add(pending_.features, reward, pending_.sigma_bar_sq);
  transcript_.records.append(std::move(pending_));
  transcript_.action_sets.push_back(pending_actions_);
  if (!set_groups_.empty() && set_groups_.back().first == pending_actions_)
    ++set_groups_.back().second;
  else
    set_groups_.emplace_back(pending_actions_, 1);
}

}  // namespace fgtsva
