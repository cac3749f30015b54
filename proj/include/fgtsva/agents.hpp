#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fgtsva/bandit_core.hpp"
#include "fgtsva/discrete.hpp"
#include "fgtsva/posterior.hpp"
#include "fgtsva/rng.hpp"
#include "fgtsva/schedule.hpp"

namespace fgtsva {

struct RoundInputs {
  int t = 0;
  int context_id = 0;
  const ActionSet& actions;
  double sigma_sq = 0.0;
};

// One agent per run; act() and observe() strictly alternate.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual ActionChoice act(const RoundInputs& in, RngStream& rng) = 0;
  virtual void observe(double reward) = 0;

 protected:
  void enter_act() {
    if (awaiting_reward_) throw std::logic_error("agent: act() before previous observe()");
    awaiting_reward_ = true;
  }
  void enter_observe() {
    if (!awaiting_reward_) throw std::logic_error("agent: observe() without a pending act()");
    awaiting_reward_ = false;
  }

 private:
  bool awaiting_reward_ = false;
};

struct SgldOptions {
  int steps = 20;
  double delta0 = 0.1;
};

// Variance-aware feel-good Thompson sampling over the linear class. Each round
// advances the weight schedule with the revealed sigma_t^2, runs K SGLD steps
// on the feel-good posterior (warm-started from the previous round's chain)
// and plays the sampled parameter's argmax.
class FgtsVaLinearAgent : public Agent {
 public:
  FgtsVaLinearAgent(int d, double c, double alpha, SgldOptions sgld = {});

  ActionChoice act(const RoundInputs& in, RngStream& rng) override;
  void observe(double reward) override;

  const Transcript& transcript() const { return transcript_; }
  const ParamSchedule& schedule() const { return schedule_; }
  const Eigen::VectorXd& chain() const { return chain_; }

 private:
  ParamSchedule schedule_;
  LinearPosteriorStats stats_;
  SgldOptions sgld_;
  Eigen::VectorXd chain_;
  Transcript transcript_;
  TranscriptRecord pending_;
};

// The same algorithm over a finite class: the posterior is exact, one
// categorical draw per round.
class FgtsVaDiscreteAgent : public Agent {
 public:
  FgtsVaDiscreteAgent(std::vector<RewardFunction> fclass, double c, double alpha,
                      Eigen::VectorXd prior = {});

  ActionChoice act(const RoundInputs& in, RngStream& rng) override;
  void observe(double reward) override;

  const Transcript& transcript() const { return transcript_; }
  // Posterior over the class for the given round inputs, recomputed exactly.
  Eigen::VectorXd posterior(const RoundInputs& in, double lambda) const;

 private:
  std::vector<RewardFunction> fclass_;
  Eigen::VectorXd log_prior_;
  ParamSchedule schedule_;
  Eigen::VectorXd log_lik_;  // running -sum eta_s (r_s - f)^2 per class member
  Transcript transcript_;
  TranscriptRecord pending_;
};

// Plays argmax of the true reward function; zero-regret reference.
class OracleAgent : public Agent {
 public:
  explicit OracleAgent(RewardFunction f_star) : f_star_(std::move(f_star)) {}
  ActionChoice act(const RoundInputs& in, RngStream& rng) override;
  void observe(double reward) override;

 private:
  RewardFunction f_star_;
};

}  // namespace fgtsva
