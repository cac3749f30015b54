#pragma once

#include <memory>
#include <vector>

#include "fgtsva/agents.hpp"
#include "fgtsva/bandit_core.hpp"
#include "fgtsva/posterior.hpp"

namespace fgtsva {

// Variance-weighted ridge regression state: Sigma = lambda_reg*I + sum phi phi^T / bar^2,
// b = sum r phi / bar^2, theta_hat = Sigma^-1 b. Sigma^-1 is maintained by
// rank-1 Sherman-Morrison updates with a full re-solve every 256 rounds to
// bound drift.
class WeightedRidgeState {
 public:
  WeightedRidgeState(int d, double lambda_reg);

  void update(const Eigen::VectorXd& phi, double reward, double bar_sigma_sq);

  const Eigen::VectorXd& theta_hat() const { return theta_hat_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& sigma_inv() const { return sigma_inv_; }
  double lambda_reg() const { return lambda_reg_; }

 private:
  void resolve();
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd sigma_inv_;
  Eigen::VectorXd b_;
  Eigen::VectorXd theta_hat_;
  double lambda_reg_;
  int updates_since_resolve_ = 0;
};

// argmax over actions of <theta_hat, phi> + beta * ||phi||_{Sigma^-1}. The UCB
// objective is not sign-separable, so hypercube sets are enumerated; d > 12 is
// rejected.
ActionChoice oful_select(const WeightedRidgeState& state, const ActionSet& actions, double beta);

struct WeightedOfulOptions {
  double nu = 1.0;
  double delta_conf = 0.01;
  double lambda_reg = 1.0;
};

// Weighted ridge + UCB with beta = nu*sqrt(d*log((1+T/(alpha^2*lambda_reg))/delta_conf))
//                                 + sqrt(lambda_reg).
class WeightedOfulAgent : public Agent {
 public:
  WeightedOfulAgent(int d, int T, double alpha, WeightedOfulOptions opt = {});

  ActionChoice act(const RoundInputs& in, RngStream& rng) override;
  void observe(double reward) override;

  double beta() const { return beta_; }
  const WeightedRidgeState& state() const { return state_; }

 private:
  WeightedRidgeState state_;
  double alpha_;
  double beta_;
  Eigen::VectorXd pending_phi_;
  double pending_bar_sq_ = 0.0;
};

// Transcript plus the action set that was offered in each recorded round,
// needed by the per-step feel-good bonus.
struct FeelGoodTranscript {
  Transcript records;
  std::vector<std::shared_ptr<const ActionSet>> action_sets;
};

// Feel-good posterior with the bonus accumulated over every past round:
//   log p0(theta) + sum_s [ -eta (r_s - <theta, phi_s>)^2
//                           + lambda * max_{a in A_s} <theta, phi(a)> ],
// prior N(0, I_d/d). Sampled with the same SGLD machinery as the
// variance-aware posterior.
double fgts_typeA_log_posterior(const Eigen::VectorXd& theta, const FeelGoodTranscript& transcript,
                                double eta, double lambda);
Eigen::VectorXd fgts_typeA_grad(const Eigen::VectorXd& theta, const FeelGoodTranscript& transcript,
                                double eta, double lambda);

struct FgtsTypeAOptions {
  double eta = 1.0;
  double lambda0 = 1.0;  // lambda = lambda0 / sqrt(T)
  SgldOptions sgld;
};

class FgtsTypeAAgent : public Agent {
 public:
  FgtsTypeAAgent(int d, int T, FgtsTypeAOptions opt = {});

  ActionChoice act(const RoundInputs& in, RngStream& rng) override;
  void observe(double reward) override;

  double lambda() const { return lambda_; }
  const FeelGoodTranscript& transcript() const { return transcript_; }

 private:
  LinearPosteriorStats stats_;
  FgtsTypeAOptions opt_;
  double lambda_;
  Eigen::VectorXd chain_;
  FeelGoodTranscript transcript_;
  TranscriptRecord pending_;
  std::shared_ptr<const ActionSet> pending_actions_;
  const ActionSet* last_actions_ = nullptr;
  // Consecutive rounds sharing one action set collapse into (set, count) so the
  // feel-good sum over history is O(#distinct sets) per gradient.
  std::vector<std::pair<std::shared_ptr<const ActionSet>, int>> set_groups_;
};

}  // namespace fgtsva
