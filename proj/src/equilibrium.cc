#include "attn/equilibrium.h"

#include <cmath>
#include <limits>

#include "attn/errors.h"

namespace attn {

MonopolyResult monopoly_rate(const DecisionProblem& dp, const JointPrior& prior, double cost) {
  if (prior.space().num_senders() != 1) {
    throw InvalidArgument("monopoly rate needs exactly one sender, got " +
                          std::to_string(prior.space().num_senders()));
  }
  if (!(cost > 0.0)) throw InvalidArgument("attention cost must be positive");
  MonopolyResult out;
  out.residual_value = full_reveal_value(dp, prior.belief(), 1);
  if (cost >= out.residual_value) {
    throw AssumptionViolated("cost " + std::to_string(cost) +
                             " is not below the value of the sender's information " +
                             std::to_string(out.residual_value));
  }
  out.rate = cost / out.residual_value;
  out.sender_payoff = out.residual_value / cost;
  out.receiver_payoff = stopping_utility(dp, prior.belief()).stopping_value;
  return out;
}

EquilibriumProfile::EquilibriumProfile(std::shared_ptr<const StateGraph> graph, double cost,
                                       ConditionReport visit_worth, ConditionReport substitutes)
    : graph_(std::move(graph)),
      cost_(cost),
      visit_worth_(std::move(visit_worth)),
      substitutes_(std::move(substitutes)) {}

double EquilibriumProfile::rate(std::size_t id, int sender) const {
  if (graph_->node(id).revealed.contains(sender)) return std::numeric_limits<double>::quiet_NaN();
  const double value = graph_->expected_residual(id, sender);
  if (value <= 0.0) return std::numeric_limits<double>::infinity();
  return cost_ / value;
}

double EquilibriumProfile::expected_visits(std::size_t id, int sender) const {
  if (graph_->node(id).revealed.contains(sender)) return 0.0;
  return graph_->expected_residual(id, sender) / cost_;
}

std::vector<double> EquilibriumProfile::sender_payoffs() const {
  std::vector<double> out;
  for (int i = 1; i <= num_senders(); ++i) out.push_back(expected_visits(StateGraph::root(), i));
  return out;
}

double EquilibriumProfile::receiver_payoff() const {
  double total = full_info_stopping();
  for (double visits : sender_payoffs()) total -= cost_ * visits;
  return total;
}

bool EquilibriumProfile::rates_in_unit_interval() const {
  for (std::size_t id = 0; id < graph_->size(); ++id) {
    for (int i = 1; i <= num_senders(); ++i) {
      if (graph_->node(id).revealed.contains(i)) continue;
      const double r = rate(id, i);
      if (!(r > 0.0 && r < 1.0)) return false;
    }
  }
  return true;
}

EquilibriumProfile aon_rates(const DecisionProblem& dp, const JointPrior& prior, double cost,
                             const ProfileOptions& options) {
  if (!(cost > 0.0)) throw InvalidArgument("attention cost must be positive");
  auto graph = std::make_shared<const StateGraph>(dp, prior);
  ConditionReport a2 = check_visit_worth(*graph, cost);
  ConditionReport su = check_substitutes(*graph, dp, options.substitutes_samples, options.seed);
  if (!options.force) {
    if (!a2.holds) {
      const Witness& w = a2.witnesses.front();
      throw AssumptionViolated("information is not worth one visit: " + w.context +
                               " has residual value " + std::to_string(w.rhs) + " <= cost " +
                               std::to_string(w.lhs));
    }
    if (!su.holds) {
      const Witness& w = su.witnesses.front();
      throw ConditionNotVerified("substitutes condition fails: " + w.context + " (" +
                                 std::to_string(w.lhs) + " < " + std::to_string(w.rhs) +
                                 "); rerun with force to compute the rates anyway");
    }
  }
  return EquilibriumProfile(std::move(graph), cost, std::move(a2), std::move(su));
}

std::vector<double> marginal_prices(const DecisionProblem& dp, const JointPrior& prior) {
  const int n = prior.space().num_senders();
  GroupedValues grouped(dp, prior.mass());
  const SenderSet everyone = SenderSet::all(n);
  const double full = grouped.expected_stopping(everyone);
  std::vector<double> prices;
  for (int i = 1; i <= n; ++i) {
    prices.push_back(full - grouped.expected_stopping(everyone.without(i)));
  }
  return prices;
}

Environment merge_senders(const Environment& env, int a, int b) {
  const JointSpace& space = env.prior.space();
  space.check_sender(a);
  space.check_sender(b);
  if (a == b) throw InvalidArgument("cannot merge a sender with itself");
  if (a > b) std::swap(a, b);

  const ComponentSpace& ca = space.component(a);
  const ComponentSpace& cb = space.component(b);
  ComponentSpace merged{ca.name + "*" + cb.name, {}};
  for (const auto& va : ca.values) {
    for (const auto& vb : cb.values) merged.values.push_back(va + "|" + vb);
  }
  std::vector<ComponentSpace> components;
  for (int k = 0; k < space.num_components(); ++k) {
    if (k == a) {
      components.push_back(merged);
    } else if (k != b) {
      components.push_back(space.component(k));
    }
  }
  auto new_space = std::make_shared<const JointSpace>(std::move(components));

  const int nb = space.num_values(b);
  auto map_state = [&](std::size_t state) {
    const auto digits = space.decode(state);
    std::vector<int> out;
    for (int k = 0; k < space.num_components(); ++k) {
      if (k == a) {
        out.push_back(digits[a] * nb + digits[b]);
      } else if (k != b) {
        out.push_back(digits[k]);
      }
    }
    return new_space->encode(out);
  };

  std::vector<double> mass(new_space->num_states(), 0.0);
  for (std::size_t s = 0; s < space.num_states(); ++s) mass[map_state(s)] += env.prior[s];
  JointPrior prior(new_space, std::move(mass));

  const DecisionProblem& dp = env.dp;
  const int num_actions = dp.num_actions();
  if (dp.payoff_state_only()) {
    std::vector<std::vector<double>> table(num_actions);
    for (int act = 0; act < num_actions; ++act) {
      for (int w0 = 0; w0 < space.num_values(0); ++w0) {
        table[act].push_back(dp.payoff_state_utility(act, w0));
      }
    }
    return {env.name + "-merged", std::move(prior),
            DecisionProblem::over_payoff_state(new_space, dp.actions(), std::move(table))};
  }
  std::vector<std::vector<double>> table(num_actions,
                                         std::vector<double>(new_space->num_states(), 0.0));
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    const std::size_t t = map_state(s);
    for (int act = 0; act < num_actions; ++act) table[act][t] = dp.utility(act, s);
  }
  return {env.name + "-merged", std::move(prior),
          DecisionProblem(new_space, dp.actions(), std::move(table))};
}

}  // namespace attn
