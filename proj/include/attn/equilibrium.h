#ifndef ATTN_EQUILIBRIUM_H_
#define ATTN_EQUILIBRIUM_H_

// All-or-nothing equilibrium objects: the monopoly rate, the multi-sender
// rate table lambda*_i(w_S) over the reachable-state graph, the theoretical
// payoffs, and the marginal-contribution prices of the auxiliary exchange.

#include <cstdint>
#include <memory>
#include <vector>

#include "attn/conditions.h"
#include "attn/decision.h"
#include "attn/environment.h"
#include "attn/state_graph.h"

namespace attn {

struct MonopolyResult {
  double rate = 0.0;             // c / v-bar(w_1)
  double residual_value = 0.0;   // v-bar(w_1 | mu^0)
  double sender_payoff = 0.0;    // expected visits v-bar / c
  double receiver_payoff = 0.0;  // U(mu^0)
};

// Requires exactly one sender; throws AssumptionViolated when c >= v-bar.
MonopolyResult monopoly_rate(const DecisionProblem& dp, const JointPrior& prior, double cost);

struct ProfileOptions {
  bool force = false;
  std::size_t substitutes_samples = 0;
  std::uint64_t seed = 1;
};

class EquilibriumProfile {
 public:
  EquilibriumProfile(std::shared_ptr<const StateGraph> graph, double cost,
                     ConditionReport visit_worth, ConditionReport substitutes);

  const StateGraph& graph() const { return *graph_; }
  const std::shared_ptr<const StateGraph>& graph_ptr() const { return graph_; }
  double cost() const { return cost_; }
  int num_senders() const { return graph_->num_senders(); }

  // lambda*_i at a node; NaN once sender i has been revealed there. When the
  // expected residual value is 0 (possible only under force) the rate is +inf.
  double rate(std::size_t id, int sender) const;
  // E[v-bar_i | node] / c, the expected number of further visits to i.
  double expected_visits(std::size_t id, int sender) const;

  // Per-sender expected visits from the prior.
  std::vector<double> sender_payoffs() const;
  // E[U(mu'(w_N))] - c * sum of sender payoffs.
  double receiver_payoff() const;
  double full_info_stopping() const { return graph_->expected_full_stopping(StateGraph::root()); }

  // Visit-worth and (SU) both verified.
  bool is_equilibrium() const { return visit_worth_.holds && substitutes_.holds; }
  // Every rate at every reachable state lies in (0, 1).
  bool rates_in_unit_interval() const;

  const ConditionReport& visit_worth() const { return visit_worth_; }
  const ConditionReport& substitutes() const { return substitutes_; }

 private:
  std::shared_ptr<const StateGraph> graph_;
  double cost_;
  ConditionReport visit_worth_;
  ConditionReport substitutes_;
};

// Throws AssumptionViolated or ConditionNotVerified unless options.force.
EquilibriumProfile aon_rates(const DecisionProblem& dp, const JointPrior& prior, double cost,
                             const ProfileOptions& options = {});

// p_i = f(N) - f(N - i).
std::vector<double> marginal_prices(const DecisionProblem& dp, const JointPrior& prior);

// Replaces senders a and b by one sender owning the product component
// (w_a, w_b). The merged sender takes the smaller index; later senders shift
// down by one.
Environment merge_senders(const Environment& env, int a, int b);

}  // namespace attn

#endif  // ATTN_EQUILIBRIUM_H_
