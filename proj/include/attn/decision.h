#ifndef ATTN_DECISION_H_
#define ATTN_DECISION_H_

// Decision problems and the value-of-information calculus: stopping utility
// U, full-information utility U-bar, experiment values v(lambda | mu),
// residual values v-bar(w_i | .), and the coalition value f(S).
//
// Everything is exact enumeration over the finite joint space.

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "attn/environment.h"

namespace attn {

class DecisionProblem {
 public:
  // utility[a][state] over the full joint enumeration.
  DecisionProblem(SpacePtr space, std::vector<std::string> actions,
                  std::vector<std::vector<double>> utility);

  // utility[a][w0]; the receiver's payoff depends on the state only through
  // the payoff component and is broadcast over the senders' components.
  static DecisionProblem over_payoff_state(SpacePtr space, std::vector<std::string> actions,
                                           std::vector<std::vector<double>> utility);

  const JointSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int num_actions() const { return static_cast<int>(actions_.size()); }
  const std::vector<std::string>& actions() const { return actions_; }

  bool payoff_state_only() const { return payoff_state_only_; }
  double utility(int action, std::size_t state) const {
    return table_[static_cast<std::size_t>(action) * columns_ + column(state)];
  }
  // Only meaningful when payoff_state_only().
  double payoff_state_utility(int action, int w0) const {
    return table_[static_cast<std::size_t>(action) * columns_ + static_cast<std::size_t>(w0)];
  }
  // max_a u(a, state)
  double best_utility(std::size_t state) const;

 private:
  DecisionProblem(SpacePtr space, std::vector<std::string> actions, bool payoff_state_only,
                  std::size_t columns, std::vector<std::vector<double>> utility);
  std::size_t column(std::size_t state) const {
    return payoff_state_only_ ? static_cast<std::size_t>(space_->value_index(state, 0)) : state;
  }

  SpacePtr space_;
  std::vector<std::string> actions_;
  bool payoff_state_only_ = false;
  std::size_t columns_ = 0;
  std::vector<double> table_;
};

// A prior together with the receiver's decision problem on the same space.
struct Environment {
  std::string name;
  JointPrior prior;
  DecisionProblem dp;
};

struct ValueReport {
  double stopping_value = 0.0;
  double full_info_value = 0.0;
  int optimal_action = 0;  // lowest index among maximisers
};

// Best action for the per-action sums, ties (within 1e-12 relative) going to
// the lowest index.
int best_action(std::span<const double> sums);

ValueReport stopping_utility(const DecisionProblem& dp, const Belief& belief);
double full_info_utility(const DecisionProblem& dp, const Belief& belief);

// v(lambda | mu) = sum_m L(m) U(mu'(mu, m)) - U(mu).
double experiment_value(const DecisionProblem& dp, const Belief& belief,
                        const Experiment& experiment);

// v-bar(w_i | mu): value of learning sender i's component exactly.
double full_reveal_value(const DecisionProblem& dp, const Belief& belief, int sender);
// v-bar(w_i | w_S) at the posterior of the prior given the assignment.
double full_reveal_value_given(const DecisionProblem& dp, const JointPrior& prior, int sender,
                               const Assignment& assignment);

// E_{w_{-i} ~ mu}[ v-bar(w_i | w_{-i}) ].
double expected_residual_value(const DecisionProblem& dp, const Belief& belief, int sender);

// f(S) = E_{w_S}[U(mu'(w_S))] - U(mu^0); f(empty) = 0.
double coalition_value(const DecisionProblem& dp, const JointPrior& prior, SenderSet subset);

// For one mass vector (a prior or belief, possibly unnormalised) and any
// subset S of senders: per realisation w_S, the mass P(w_S) and the best
// achievable unnormalised expected utility max_a sum_{w ~ w_S} mu(w) u(a, w).
// Dividing the latter by the former gives U(mu'(w_S)); summing it over w_S
// gives E_{w_S}[U(mu'(w_S))]. Tables are built lazily per subset.
class GroupedValues {
 public:
  struct Cell {
    double mass = 0.0;
    double value = 0.0;
    int action = 0;
  };

  GroupedValues(const DecisionProblem& dp, std::span<const double> mass);

  const SubsetCoder& coder(SenderSet subset);
  const std::vector<Cell>& cells(SenderSet subset);
  double expected_stopping(SenderSet subset);

 private:
  struct Table {
    SubsetCoder coder;
    std::vector<Cell> cells;
  };
  Table& table(SenderSet subset);

  const DecisionProblem* dp_;
  std::vector<double> mass_;
  std::unordered_map<std::uint32_t, Table> tables_;
};

}  // namespace attn

#endif  // ATTN_DECISION_H_
