#include "fgtsva/bandit_core.hpp"

#include <cmath>
#include <stdexcept>

namespace fgtsva {

ActionSet ActionSet::hypercube(int d) {
  if (d < 1 || d > 62) throw std::invalid_argument("hypercube: d must be in [1, 62]");
  ActionSet s;
  s.d_ = d;
  s.hypercube_ = true;
  return s;
}

ActionSet ActionSet::explicit_set(std::vector<Eigen::VectorXd> features) {
  if (features.empty()) throw std::invalid_argument("explicit_set: no actions");
  const auto d = features.front().size();
  for (const auto& phi : features) {
    if (phi.size() != d) throw std::invalid_argument("explicit_set: mixed feature dimensions");
    if (phi.norm() > 1.0 + 1e-9) throw std::invalid_argument("explicit_set: feature norm exceeds 1");
  }
  ActionSet s;
  s.d_ = static_cast<int>(d);
  s.features_ = std::move(features);
  return s;
}

std::int64_t ActionSet::size() const {
  if (hypercube_) return std::int64_t{1} << d_;
  return static_cast<std::int64_t>(features_.size());
}

Eigen::VectorXd ActionSet::feature(std::int64_t id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("ActionSet::feature: bad action id");
  if (!hypercube_) return features_[static_cast<std::size_t>(id)];
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
  Eigen::VectorXd phi(d_);
  for (int j = 0; j < d_; ++j) phi[j] = (id >> j) & 1 ? -scale : scale;
  return phi;
}

void Transcript::append(TranscriptRecord rec) {
  const int expected = static_cast<int>(records_.size()) + 1;
  if (rec.round != expected) throw std::logic_error("Transcript::append: rounds must be contiguous from 1");
  records_.push_back(std::move(rec));
}

RewardFunction RewardFunction::linear(Eigen::VectorXd theta) {
  if (theta.norm() > 1.0 + 1e-9) throw std::invalid_argument("linear reward: ||theta|| exceeds 1");
  RewardFunction f;
  f.linear_ = true;
  f.theta_ = std::move(theta);
  return f;
}

RewardFunction RewardFunction::tabular(std::vector<std::vector<double>> values) {
  if (values.empty()) throw std::invalid_argument("tabular reward: no contexts");
  for (const auto& row : values) {
    if (row.empty()) throw std::invalid_argument("tabular reward: empty context row");
    for (double v : row)
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("tabular reward: value outside [0, 1]");
  }
  RewardFunction f;
  f.values_ = std::move(values);
  return f;
}

const Eigen::VectorXd& RewardFunction::theta() const {
  if (!linear_) throw std::logic_error("theta() on a tabular reward");
  return theta_;
}

double RewardFunction::value(const ActionSet& actions, int context_id,
                             std::int64_t action_id) const {
  if (linear_) {
    if (theta_.size() != actions.dim()) throw std::invalid_argument("reward/action dimension mismatch");
    return theta_.dot(actions.feature(action_id));
  }
  if (context_id < 0 || context_id >= static_cast<int>(values_.size()))
    throw std::out_of_range("tabular reward: bad context id");
  const auto& row = values_[static_cast<std::size_t>(context_id)];
  if (action_id < 0 || action_id >= static_cast<std::int64_t>(row.size()))
    throw std::out_of_range("tabular reward: bad action id");
  return row[static_cast<std::size_t>(action_id)];
}

double RewardFunction::value_at(const TranscriptRecord& rec) const {
  if (linear_) {
    if (theta_.size() != rec.features.size())
      throw std::invalid_argument("reward/record dimension mismatch");
    return theta_.dot(rec.features);
  }
  if (rec.context_id < 0 || rec.context_id >= static_cast<int>(values_.size()))
    throw std::out_of_range("tabular reward: bad context id");
  const auto& row = values_[static_cast<std::size_t>(rec.context_id)];
  if (rec.action_id < 0 || rec.action_id >= static_cast<std::int64_t>(row.size()))
    throw std::out_of_range("tabular reward: bad action id");
  return row[static_cast<std::size_t>(rec.action_id)];
}

ActionChoice argmax_linear(const Eigen::VectorXd& theta, const ActionSet& actions) {
  if (theta.size() != actions.dim()) throw std::invalid_argument("argmax: dimension mismatch");
  ActionChoice best;
  if (actions.is_hypercube()) {
    // Componentwise sign; zero maps to the +1/sqrt(d) corner.
    std::int64_t id = 0;
    for (int j = 0; j < theta.size(); ++j)
      if (theta[j] < 0.0) id |= std::int64_t{1} << j;
    best.id = id;
    best.feature = actions.feature(id);
    best.value = theta.dot(best.feature);
    return best;
  }
  best.id = 0;
  best.value = theta.dot(actions.feature(0));
  for (std::int64_t i = 1; i < actions.size(); ++i) {
    const double v = theta.dot(actions.feature(i));
    if (v > best.value) {
      best.value = v;
      best.id = i;
    }
  }
  best.feature = actions.feature(best.id);
  return best;
}

ActionChoice argmax_action(const RewardFunction& f, const ActionSet& actions, int context_id) {
  if (f.is_linear()) return argmax_linear(f.theta(), actions);
  ActionChoice best;
  best.id = 0;
  best.value = f.value(actions, context_id, 0);
  for (std::int64_t i = 1; i < actions.size(); ++i) {
    const double v = f.value(actions, context_id, i);
    if (v > best.value) {
      best.value = v;
      best.id = i;
    }
  }
  best.feature = actions.feature(best.id);
  return best;
}

double regret_increment(const RewardFunction& f_star, const ActionSet& actions,
                        const ActionChoice& chosen, int context_id) {
  const ActionChoice best = argmax_action(f_star, actions, context_id);
  double chosen_value;
  if (f_star.is_linear()) {
    if (f_star.theta().size() != chosen.feature.size())
      throw std::invalid_argument("regret_increment: dimension mismatch");
    chosen_value = f_star.theta().dot(chosen.feature);
  } else {
    chosen_value = f_star.value(actions, context_id, chosen.id);
  }
  // Exact value ties can land an ulp below zero; clamp.
  return std::max(0.0, best.value - chosen_value);
}

}  // namespace fgtsva
