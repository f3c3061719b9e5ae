#include "attn/conditions.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attn/errors.h"
#include "attn/rng.h"

namespace attn {

namespace {

// Accumulates slacks for one layer; slack < -tol (or <= tol when strict) is a
// violation.
class Tally {
 public:
  Tally(std::string name, bool strict) : strict_(strict) { layer_.name = std::move(name); }

  void add(double slack, std::string_view context, double lhs, double rhs,
           std::vector<Witness>& witnesses) {
    if (std::abs(slack) <= kInequalityTolerance && !strict_) slack = 0.0;
    ++layer_.checked;
    min_slack_ = std::min(min_slack_, slack);
    const bool violated = strict_ ? slack <= kInequalityTolerance : slack < -kInequalityTolerance;
    if (!violated) return;
    ++layer_.violations;
    layer_.holds = false;
    if (witnesses.size() < ConditionReport::kMaxWitnesses) {
      witnesses.push_back({std::string(context), lhs, rhs});
    }
  }

  ConditionLayer finish() {
    layer_.margin = layer_.checked == 0 ? 0.0 : min_slack_;
    return layer_;
  }

 private:
  ConditionLayer layer_;
  bool strict_;
  double min_slack_ = std::numeric_limits<double>::infinity();
};

void absorb(ConditionReport& report, const ConditionLayer& layer) {
  if (layer.checked > 0) {
    report.margin = report.checked == 0 ? layer.margin : std::min(report.margin, layer.margin);
  }
  report.checked += layer.checked;
  report.violations += layer.violations;
  report.holds = report.holds && layer.holds;
  report.layers.push_back(layer);
}

}  // namespace

ConditionReport check_visit_worth(const StateGraph& graph, double cost) {
  if (!(cost > 0.0)) throw InvalidArgument("attention cost must be positive");
  ConditionReport report;
  report.condition = "visit_worth";
  const int n = graph.num_senders();
  const SenderSet everyone = SenderSet::all(n);
  Tally tally("residual", true);
  for (std::size_t id = 0; id < graph.size(); ++id) {
    const auto& node = graph.node(id);
    if (node.revealed.size() != n - 1) continue;
    for (int i = 1; i <= n; ++i) {
      if (!(node.revealed == everyone.without(i))) continue;
      const double vbar = graph.residual_value(id, i);
      tally.add(vbar - cost,
                "sender " + std::to_string(i) + " given w_-i = " + graph.describe(id), cost,
                vbar, report.witnesses);
    }
  }
  absorb(report, tally.finish());
  return report;
}

ConditionReport check_visit_worth(const DecisionProblem& dp, const JointPrior& prior,
                                  double cost) {
  return check_visit_worth(StateGraph(dp, prior), cost);
}

ConditionReport check_substitutes(const StateGraph& graph, const DecisionProblem& dp,
                                  std::size_t samples, std::uint64_t seed) {
  ConditionReport report;
  report.condition = "substitutes";
  const int n = graph.num_senders();

  Tally exact("exact", false);
  for (std::size_t id = 0; id < graph.size(); ++id) {
    const auto& node = graph.node(id);
    for (int i = 1; i <= n; ++i) {
      if (node.revealed.contains(i)) continue;
      const double lhs = graph.residual_value(id, i);
      const double rhs = graph.expected_residual(id, i);
      exact.add(lhs - rhs, "sender " + std::to_string(i) + " at w_S = " + graph.describe(id), lhs,
                rhs, report.witnesses);
    }
  }
  absorb(report, exact.finish());

  if (samples > 0) {
    Tally sampled("sampled", false);
    const JointPrior& prior = graph.prior();
    const JointSpace& space = prior.space();
    std::size_t rejected = 0;
    if (n >= 2) {
      for (std::size_t k = 0; k < samples; ++k) {
        Rng rng(derive_seed(seed, k));
        const int i = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
        const int rounds = 1 + static_cast<int>(rng.below(3));
        Belief belief = prior.belief();
        std::string context = "sender " + std::to_string(i) + " after garbling";
        for (int r = 0; r < rounds; ++r) {
          int j = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n - 1)));
          if (j >= i) ++j;
          const double flip = rng.uniform();
          const Experiment garble = Experiment::symmetric_channel(space, j, flip);
          const auto dist = message_distribution(belief, garble);
          const int m = static_cast<int>(rng.categorical(dist));
          belief = update(belief, garble, m);
          context += " j=" + std::to_string(j) + ",flip=" + std::to_string(flip) +
                     ",m=" + garble.messages()[m];
        }
        if (!no_direct_info(belief, prior, i)) {
          ++rejected;
          continue;
        }
        const double lhs = full_reveal_value(dp, belief, i);
        const double rhs = expected_residual_value(dp, belief, i);
        sampled.add(lhs - rhs, context, lhs, rhs, report.witnesses);
      }
    }
    absorb(report, sampled.finish());
    if (n < 2) {
      report.note = "sampled layer skipped: garblings need a second sender";
    } else if (rejected > 0) {
      report.note = std::to_string(rejected) + " sampled beliefs failed the no-direct-info check";
    }
  }
  return report;
}

ConditionReport check_substitutes(const DecisionProblem& dp, const JointPrior& prior,
                                  std::size_t samples, std::uint64_t seed) {
  return check_substitutes(StateGraph(dp, prior), dp, samples, seed);
}

std::vector<double> coalition_table(const DecisionProblem& dp, const JointPrior& prior) {
  const int n = prior.space().num_senders();
  if (n > StateGraph::kMaxSenders) {
    throw SubsetSpaceTooLarge("coalition table needs n <= " +
                              std::to_string(StateGraph::kMaxSenders));
  }
  GroupedValues grouped(dp, prior.mass());
  const std::uint32_t num_subsets = 1U << n;
  std::vector<double> f(num_subsets, 0.0);
  const double base = grouped.expected_stopping(SenderSet());
  for (std::uint32_t bits = 1; bits < num_subsets; ++bits) {
    f[bits] = grouped.expected_stopping(SenderSet::from_bits(bits)) - base;
  }
  return f;
}

ConditionReport check_mnat_concave(std::span<const double> f, int num_senders) {
  if (num_senders > StateGraph::kMaxSenders) {
    throw SubsetSpaceTooLarge("M-natural check enumerates 4^n subset pairs; n = " +
                              std::to_string(num_senders) + " exceeds " +
                              std::to_string(StateGraph::kMaxSenders));
  }
  const std::uint32_t num_subsets = 1U << num_senders;
  if (f.size() != num_subsets) throw InvalidArgument("coalition table has the wrong size");
  ConditionReport report;
  report.condition = "mnat_concave";
  Tally tally("subsets", false);
  for (std::uint32_t s_bits = 0; s_bits < num_subsets; ++s_bits) {
    for (std::uint32_t t_bits = 0; t_bits < num_subsets; ++t_bits) {
      const std::uint32_t s_only = s_bits & ~t_bits;
      const std::uint32_t t_only = t_bits & ~s_bits;
      for (int s = 1; s <= num_senders; ++s) {
        const std::uint32_t sb = 1U << (s - 1);
        if (!(s_only & sb)) continue;
        const double lhs = f[s_bits] + f[t_bits];
        double best = f[s_bits & ~sb] + f[t_bits | sb];
        for (int t = 1; t <= num_senders; ++t) {
          const std::uint32_t tb = 1U << (t - 1);
          if (!(t_only & tb)) continue;
          best = std::max(best, f[(s_bits & ~sb) | tb] + f[(t_bits | sb) & ~tb]);
        }
        tally.add(best - lhs,
                  "S=" + SenderSet::from_bits(s_bits).to_string() +
                      " T=" + SenderSet::from_bits(t_bits).to_string() + " s=" + std::to_string(s),
                  lhs, best, report.witnesses);
      }
    }
  }
  absorb(report, tally.finish());
  return report;
}

ConditionReport check_mnat_concave(const DecisionProblem& dp, const JointPrior& prior) {
  const int n = prior.space().num_senders();
  if (n > StateGraph::kMaxSenders) {
    throw SubsetSpaceTooLarge("M-natural check supports at most " +
                              std::to_string(StateGraph::kMaxSenders) + " senders");
  }
  const auto f = coalition_table(dp, prior);
  return check_mnat_concave(f, n);
}

}  // namespace attn
