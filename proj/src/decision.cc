#include "attn/decision.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attn/errors.h"

namespace attn {

namespace {

void check_same_space(const DecisionProblem& dp, const Belief& belief) {
  if (dp.space().num_states() != belief.space().num_states() ||
      dp.space().num_components() != belief.space().num_components()) {
    throw InvalidArgument("decision problem and belief live on different joint spaces");
  }
}

// Per-action sums sum_w weight(w) u(a, w).
template <typename Weight>
std::vector<double> action_sums(const DecisionProblem& dp, std::size_t num_states, Weight weight) {
  std::vector<double> sums(dp.num_actions(), 0.0);
  for (std::size_t s = 0; s < num_states; ++s) {
    const double w = weight(s);
    if (w == 0.0) continue;
    for (int a = 0; a < dp.num_actions(); ++a) sums[a] += w * dp.utility(a, s);
  }
  return sums;
}

}  // namespace

DecisionProblem::DecisionProblem(SpacePtr space, std::vector<std::string> actions,
                                 std::vector<std::vector<double>> utility)
    : DecisionProblem(space, std::move(actions), false, space ? space->num_states() : 0,
                      std::move(utility)) {}

DecisionProblem DecisionProblem::over_payoff_state(SpacePtr space,
                                                   std::vector<std::string> actions,
                                                   std::vector<std::vector<double>> utility) {
  const auto columns = space ? static_cast<std::size_t>(space->num_values(0)) : 0;
  return DecisionProblem(std::move(space), std::move(actions), true, columns,
                         std::move(utility));
}

DecisionProblem::DecisionProblem(SpacePtr space, std::vector<std::string> actions,
                                 bool payoff_state_only, std::size_t columns,
                                 std::vector<std::vector<double>> utility)
    : space_(std::move(space)),
      actions_(std::move(actions)),
      payoff_state_only_(payoff_state_only),
      columns_(columns) {
  if (!space_) throw InvalidArgument("decision problem without a joint space");
  if (actions_.empty()) throw InvalidArgument("decision problem needs at least one action");
  if (utility.size() != actions_.size()) {
    throw InvalidArgument("utility table needs one row per action");
  }
  table_.reserve(actions_.size() * columns_);
  for (std::size_t a = 0; a < utility.size(); ++a) {
    if (utility[a].size() != columns_) {
      throw InvalidArgument("utility row for action '" + actions_[a] + "' has " +
                            std::to_string(utility[a].size()) + " entries, expected " +
                            std::to_string(columns_));
    }
    for (double u : utility[a]) {
      if (!std::isfinite(u)) throw InvalidArgument("utility values must be finite");
      table_.push_back(u);
    }
  }
}

double DecisionProblem::best_utility(std::size_t state) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_actions(); ++a) best = std::max(best, utility(a, state));
  return best;
}

int best_action(std::span<const double> sums) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(sums.size()); ++a) {
    const double scale = std::max({1.0, std::abs(sums[a]), std::abs(sums[best])});
    if (sums[a] > sums[best] + 1e-12 * scale) best = a;
  }
  return best;
}

namespace {
double max_of(std::span<const double> sums) { return *std::max_element(sums.begin(), sums.end()); }
}  // namespace

ValueReport stopping_utility(const DecisionProblem& dp, const Belief& belief) {
  check_same_space(dp, belief);
  const auto sums = action_sums(dp, belief.size(), [&](std::size_t s) { return belief[s]; });
  ValueReport report;
  report.optimal_action = best_action(sums);
  report.stopping_value = max_of(sums);
  report.full_info_value = full_info_utility(dp, belief);
  return report;
}

double full_info_utility(const DecisionProblem& dp, const Belief& belief) {
  check_same_space(dp, belief);
  double total = 0.0;
  for (std::size_t s = 0; s < belief.size(); ++s) {
    if (belief[s] > 0.0) total += belief[s] * dp.best_utility(s);
  }
  return total;
}

double experiment_value(const DecisionProblem& dp, const Belief& belief,
                        const Experiment& experiment) {
  check_same_space(dp, belief);
  const JointSpace& space = belief.space();
  space.check_sender(experiment.sender());
  if (experiment.num_values() != space.num_values(experiment.sender())) {
    throw InvalidArgument("experiment kernel does not match the sender's component");
  }
  const int sender = experiment.sender();
  // sum_m L(m) U(mu'(m)) = sum_m max_a sum_w mu(w) lambda(w_i, m) u(a, w)
  double with_info = 0.0;
  for (int m = 0; m < experiment.num_messages(); ++m) {
    const auto sums = action_sums(dp, belief.size(), [&](std::size_t s) {
      return belief[s] * experiment.likelihood(space.value_index(s, sender), m);
    });
    with_info += max_of(sums);
  }
  const auto prior_sums = action_sums(dp, belief.size(), [&](std::size_t s) { return belief[s]; });
  return with_info - max_of(prior_sums);
}

double full_reveal_value(const DecisionProblem& dp, const Belief& belief, int sender) {
  check_same_space(dp, belief);
  belief.space().check_sender(sender);
  GroupedValues grouped(dp, belief.mass());
  return grouped.expected_stopping(SenderSet::of({sender})) -
         grouped.expected_stopping(SenderSet());
}

double full_reveal_value_given(const DecisionProblem& dp, const JointPrior& prior, int sender,
                               const Assignment& assignment) {
  return full_reveal_value(dp, condition_on_components(prior, assignment), sender);
}

double expected_residual_value(const DecisionProblem& dp, const Belief& belief, int sender) {
  check_same_space(dp, belief);
  belief.space().check_sender(sender);
  const SenderSet everyone = SenderSet::all(belief.space().num_senders());
  GroupedValues grouped(dp, belief.mass());
  return grouped.expected_stopping(everyone) - grouped.expected_stopping(everyone.without(sender));
}

double coalition_value(const DecisionProblem& dp, const JointPrior& prior, SenderSet subset) {
  check_same_space(dp, prior.belief());
  if (!subset.is_subset_of(SenderSet::all(prior.space().num_senders()))) {
    throw UnknownComponent("coalition contains an unknown sender");
  }
  if (subset.empty()) return 0.0;
  GroupedValues grouped(dp, prior.mass());
  return grouped.expected_stopping(subset) - grouped.expected_stopping(SenderSet());
}

// ---------------------------------------------------------------------------
// GroupedValues

GroupedValues::GroupedValues(const DecisionProblem& dp, std::span<const double> mass)
    : dp_(&dp), mass_(mass.begin(), mass.end()) {
  if (mass_.size() != dp.space().num_states()) {
    throw InvalidArgument("mass vector does not match the decision problem's joint space");
  }
}

const SubsetCoder& GroupedValues::coder(SenderSet subset) { return table(subset).coder; }

const std::vector<GroupedValues::Cell>& GroupedValues::cells(SenderSet subset) {
  return table(subset).cells;
}

double GroupedValues::expected_stopping(SenderSet subset) {
  double total = 0.0;
  for (const Cell& cell : cells(subset)) total += cell.value;
  return total;
}

GroupedValues::Table& GroupedValues::table(SenderSet subset) {
  if (auto it = tables_.find(subset.bits()); it != tables_.end()) return it->second;

  const DecisionProblem& dp = *dp_;
  const JointSpace& space = dp.space();
  SubsetCoder coder(space, subset);
  const std::size_t codes = coder.num_codes();
  const int num_actions = dp.num_actions();
  std::vector<Cell> cells(codes);
  std::vector<double> sums(codes * static_cast<std::size_t>(num_actions), 0.0);

  if (dp.payoff_state_only()) {
    // Collapse to P(w_S, w_0) first; the utility only needs w_0.
    const auto states0 = static_cast<std::size_t>(space.num_values(0));
    std::vector<double> joint(codes * states0, 0.0);
    for (std::size_t s = 0; s < mass_.size(); ++s) {
      if (mass_[s] == 0.0) continue;
      joint[coder.code_of_state(s) * states0 + space.value_index(s, 0)] += mass_[s];
    }
    for (std::size_t g = 0; g < codes; ++g) {
      for (std::size_t w0 = 0; w0 < states0; ++w0) {
        const double m = joint[g * states0 + w0];
        if (m == 0.0) continue;
        cells[g].mass += m;
        for (int a = 0; a < num_actions; ++a) {
          sums[g * num_actions + a] += m * dp.payoff_state_utility(a, static_cast<int>(w0));
        }
      }
    }
  } else {
    for (std::size_t s = 0; s < mass_.size(); ++s) {
      const double m = mass_[s];
      if (m == 0.0) continue;
      const std::size_t g = coder.code_of_state(s);
      cells[g].mass += m;
      for (int a = 0; a < num_actions; ++a) sums[g * num_actions + a] += m * dp.utility(a, s);
    }
  }

  for (std::size_t g = 0; g < codes; ++g) {
    if (cells[g].mass == 0.0) continue;
    std::span<const double> row(sums.data() + g * num_actions, num_actions);
    cells[g].action = best_action(row);
    cells[g].value = max_of(row);
  }
  auto [it, inserted] = tables_.emplace(subset.bits(), Table{std::move(coder), std::move(cells)});
  return it->second;
}

}  // namespace attn
