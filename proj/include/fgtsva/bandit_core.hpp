#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace fgtsva {

struct ActionChoice {
  std::int64_t id = -1;
  Eigen::VectorXd feature;
  double value = 0.0;
};

// Either the hypercube {+-1/sqrt(d)}^d with phi(a) = a, or an explicit list of
// feature vectors. Hypercube action ids encode the sign pattern: bit j set
// means component j is -1/sqrt(d), so id 0 is the all-plus corner and
// enumeration order puts it first (lowest-index tie breaking favours it).
class ActionSet {
 public:
  static ActionSet hypercube(int d);
  static ActionSet explicit_set(std::vector<Eigen::VectorXd> features);

  int dim() const { return d_; }
  bool is_hypercube() const { return hypercube_; }
  std::int64_t size() const;
  Eigen::VectorXd feature(std::int64_t id) const;

 private:
  ActionSet() = default;
  int d_ = 0;
  bool hypercube_ = false;
  std::vector<Eigen::VectorXd> features_;
};

struct TranscriptRecord {
  int round = 0;  // 1-based, contiguous
  int context_id = 0;
  std::int64_t action_id = -1;
  Eigen::VectorXd features;
  double reward = 0.0;
  double sigma_bar_sq = 0.0;
};

// Append-only history of (features, reward, sigma_bar^2) per round.
class Transcript {
 public:
  void append(TranscriptRecord rec);
  int length() const { return static_cast<int>(records_.size()); }
  bool empty() const { return records_.empty(); }
  const TranscriptRecord& record(int i) const { return records_[static_cast<std::size_t>(i)]; }
  const std::vector<TranscriptRecord>& records() const { return records_; }

 private:
  std::vector<TranscriptRecord> records_;
};

// Linear: f(a) = <theta, phi(a)> with ||theta||_2 <= 1, values in [-1, 1].
// Tabular: values[context][action] in [0, 1], for finite classes over
// explicit action sets.
class RewardFunction {
 public:
  static RewardFunction linear(Eigen::VectorXd theta);
  static RewardFunction tabular(std::vector<std::vector<double>> values);

  bool is_linear() const { return linear_; }
  const Eigen::VectorXd& theta() const;
  double value(const ActionSet& actions, int context_id, std::int64_t action_id) const;
  double value_at(const TranscriptRecord& rec) const;

 private:
  RewardFunction() = default;
  bool linear_ = false;
  Eigen::VectorXd theta_;
  std::vector<std::vector<double>> values_;
};

// Maximizer of <theta, phi(a)>. On the hypercube this is the componentwise
// sign in closed form (zero components map to +1/sqrt(d)); explicit sets break
// ties by lowest index. theta is unconstrained here (posterior samples may
// leave the unit ball).
ActionChoice argmax_linear(const Eigen::VectorXd& theta, const ActionSet& actions);

ActionChoice argmax_action(const RewardFunction& f, const ActionSet& actions,
                           int context_id = 0);

// max_a f_*(a) - f_*(chosen), nonnegative whenever chosen belongs to the set.
double regret_increment(const RewardFunction& f_star, const ActionSet& actions,
                        const ActionChoice& chosen, int context_id = 0);

}  // namespace fgtsva
