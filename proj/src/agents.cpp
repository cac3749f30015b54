#include "fgtsva/agents.hpp"

#include <cmath>

namespace fgtsva {

FgtsVaLinearAgent::FgtsVaLinearAgent(int d, double c, double alpha, SgldOptions sgld)
    : schedule_(alpha, c), stats_(d), sgld_(sgld), chain_(Eigen::VectorXd::Zero(d)) {
  if (sgld_.steps < 1) throw std::invalid_argument("FgtsVaLinearAgent: K must be >= 1");
  if (sgld_.delta0 <= 0.0) throw std::invalid_argument("FgtsVaLinearAgent: delta0 must be > 0");
}

ActionChoice FgtsVaLinearAgent::act(const RoundInputs& in, RngStream& rng) {
  enter_act();
  const auto params = schedule_.on_round(in.sigma_sq);
  // The variance weights make the quadratic part's conditioning span many
  // orders of magnitude (eta reaches 1/alpha^2 on low-variance rounds), so the
  // chain is preconditioned by that part's exact precision.
  const SgldPreconditioner pre(stats_.gaussian_precision());
  sgld_sample_preconditioned(
      chain_,
      [&](const Eigen::VectorXd& th) { return stats_.grad(th, params.lambda, in.actions); },
      pre, sgld_.steps, sgld_.delta0, rng);
  ActionChoice choice = argmax_linear(chain_, in.actions);
  pending_ = TranscriptRecord{in.t, in.context_id, choice.id, choice.feature, 0.0,
                              params.bar_sigma_sq};
  return choice;
}

void FgtsVaLinearAgent::observe(double reward) {
  enter_observe();
  pending_.reward = reward;
  stats_.add(pending_.features, reward, pending_.sigma_bar_sq);
  transcript_.append(std::move(pending_));
}

FgtsVaDiscreteAgent::FgtsVaDiscreteAgent(std::vector<RewardFunction> fclass, double c,
                                         double alpha, Eigen::VectorXd prior)
    : fclass_(std::move(fclass)), schedule_(alpha, c) {
  const auto n = static_cast<Eigen::Index>(fclass_.size());
  if (n == 0) throw std::invalid_argument("FgtsVaDiscreteAgent: empty class");
  if (prior.size() == 0)
    prior = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  if (prior.size() != n) throw std::invalid_argument("FgtsVaDiscreteAgent: prior size mismatch");
  log_prior_ = prior.array().log();
  log_lik_ = Eigen::VectorXd::Zero(n);
}

ActionChoice FgtsVaDiscreteAgent::act(const RoundInputs& in, RngStream& rng) {
  enter_act();
  const auto params = schedule_.on_round(in.sigma_sq);
  Eigen::VectorXd log_w = log_prior_ + log_lik_;
  if (params.lambda != 0.0) {
    for (Eigen::Index i = 0; i < log_w.size(); ++i)
      log_w[i] += params.lambda *
                  argmax_action(fclass_[static_cast<std::size_t>(i)], in.actions, in.context_id)
                      .value;
  }
  const int pick = categorical_sample(normalize_log_weights(std::move(log_w)), rng);
  ActionChoice choice =
      argmax_action(fclass_[static_cast<std::size_t>(pick)], in.actions, in.context_id);
  pending_ = TranscriptRecord{in.t, in.context_id, choice.id, choice.feature, 0.0,
                              params.bar_sigma_sq};
  return choice;
}

void FgtsVaDiscreteAgent::observe(double reward) {
  enter_observe();
  pending_.reward = reward;
  for (Eigen::Index i = 0; i < log_lik_.size(); ++i) {
    const double resid = reward - fclass_[static_cast<std::size_t>(i)].value_at(pending_);
    log_lik_[i] -= resid * resid / pending_.sigma_bar_sq;
  }
  transcript_.append(std::move(pending_));
}

Eigen::VectorXd FgtsVaDiscreteAgent::posterior(const RoundInputs& in, double lambda) const {
  Eigen::VectorXd prior = log_prior_.array().exp();
  return discrete_posterior_weights(fclass_, transcript_, lambda, in.actions, in.context_id,
                                    prior);
}

ActionChoice OracleAgent::act(const RoundInputs& in, RngStream&) {
  enter_act();
  return argmax_action(f_star_, in.actions, in.context_id);
}

void OracleAgent::observe(double) { enter_observe(); }

}  // namespace fgtsva
