#ifndef ATTN_CONDITIONS_H_
#define ATTN_CONDITIONS_H_

// Checkers for the structural assumptions behind the AoN equilibrium:
// information worth one visit at every residual (visit worth), the
// substitutes condition (SU), and M-natural concavity of the coalition value.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "attn/decision.h"
#include "attn/environment.h"
#include "attn/state_graph.h"

namespace attn {

inline constexpr double kInequalityTolerance = 1e-10;

struct Witness {
  std::string context;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConditionLayer {
  std::string name;
  bool holds = true;
  double margin = 0.0;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

struct ConditionReport {
  std::string condition;
  bool holds = true;
  std::vector<Witness> witnesses;  // capped at kMaxWitnesses
  double margin = 0.0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<ConditionLayer> layers;
  std::string note;

  static constexpr std::size_t kMaxWitnesses = 32;
};

// c < v-bar(w_i | w_{-i}) for every sender and every w_{-i} in the support.
// Slack is v-bar - c; witnesses carry (c, v-bar).
ConditionReport check_visit_worth(const StateGraph& graph, double cost);
ConditionReport check_visit_worth(const DecisionProblem& dp, const JointPrior& prior, double cost);

// (SU) at every exact-revelation belief mu'(w_S) with i outside S, plus
// `samples` beliefs reached by random symmetric-channel garblings of other
// senders' components. Witnesses carry (v-bar(w_i | mu), E[v-bar(w_i | w_{-i})]).
ConditionReport check_substitutes(const StateGraph& graph, const DecisionProblem& dp,
                                  std::size_t samples = 0, std::uint64_t seed = 1);
ConditionReport check_substitutes(const DecisionProblem& dp, const JointPrior& prior,
                                  std::size_t samples = 0, std::uint64_t seed = 1);

// f(S) for every subset, indexed by SenderSet bits.
std::vector<double> coalition_table(const DecisionProblem& dp, const JointPrior& prior);

// f(S) + f(T) <= max{ f(S-s) + f(T+s), max_{t in T\S} f(S-s+t) + f(T+s-t) }.
// Witnesses carry (f(S) + f(T), best exchange).
ConditionReport check_mnat_concave(const DecisionProblem& dp, const JointPrior& prior);
ConditionReport check_mnat_concave(std::span<const double> f, int num_senders);

}  // namespace attn

#endif  // ATTN_CONDITIONS_H_
