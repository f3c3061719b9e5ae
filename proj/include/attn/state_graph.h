#ifndef ATTN_STATE_GRAPH_H_
#define ATTN_STATE_GRAPH_H_

// The finite set of beliefs reachable when senders only ever reveal their
// components exactly: one node per (revealed set S, realisation w_S) with
// positive prior mass. AoN play never leaves this graph, so every equilibrium
// quantity is a table over its nodes.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attn/decision.h"
#include "attn/environment.h"

namespace attn {

class StateGraph {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  static constexpr int kMaxSenders = 20;

  struct Node {
    SenderSet revealed;
    std::vector<int> realization;  // by component; -1 where unrevealed
    double probability = 0.0;      // prior probability of w_S
    double stopping_value = 0.0;   // U(mu'(w_S))
    int stop_action = 0;
  };

  StateGraph(const DecisionProblem& dp, const JointPrior& prior);

  int num_senders() const { return num_senders_; }
  std::size_t size() const { return nodes_.size(); }
  static constexpr std::size_t root() { return 0; }
  const Node& node(std::size_t id) const { return nodes_.at(id); }

  // Node reached from `id` when `sender` reveals `value`; npos if that
  // realisation has zero mass.
  std::size_t child(std::size_t id, int sender, int value) const;
  // (child, conditional probability) pairs for revealing `sender` at `id`.
  std::vector<std::pair<std::size_t, double>> transitions(std::size_t id, int sender) const;
  std::size_t find(SenderSet revealed, std::span<const int> digits) const;

  // v-bar(w_i | mu'(w_S)).
  double residual_value(std::size_t id, int sender) const;
  // E_{w_{-i} ~ mu'(w_S)}[ v-bar(w_i | w_{-i}) ].
  double expected_residual(std::size_t id, int sender) const;
  // E[ U(mu'(w_N)) | w_S ].
  double expected_full_stopping(std::size_t id) const;

  Belief belief(std::size_t id) const;
  std::string describe(std::size_t id) const;

  const JointPrior& prior() const { return prior_; }

 private:
  std::size_t slot(std::size_t id, int sender) const {
    return id * static_cast<std::size_t>(num_senders_) + static_cast<std::size_t>(sender - 1);
  }

  JointPrior prior_;
  int num_senders_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> index_;  // [subset bits][code] -> id
  std::vector<SubsetCoder> coders_;              // [subset bits]
  std::vector<double> full_value_;               // unnormalised E[U(full)] per node
  std::vector<double> residual_;                 // [id, sender]
  std::vector<double> expected_residual_;        // [id, sender]
};

}  // namespace attn

#endif  // ATTN_STATE_GRAPH_H_
