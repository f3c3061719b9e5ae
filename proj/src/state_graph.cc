#include "attn/state_graph.h"

#include <cmath>

#include "attn/errors.h"

namespace attn {

StateGraph::StateGraph(const DecisionProblem& dp, const JointPrior& prior)
    : prior_(prior), num_senders_(prior.space().num_senders()) {
  const JointSpace& space = prior.space();
  if (dp.space().num_states() != space.num_states()) {
    throw InvalidArgument("decision problem and prior live on different joint spaces");
  }
  if (num_senders_ > kMaxSenders) {
    throw SubsetSpaceTooLarge("state graph supports at most " + std::to_string(kMaxSenders) +
                              " senders");
  }
  const std::uint32_t num_subsets = 1U << num_senders_;
  const SenderSet everyone = SenderSet::all(num_senders_);
  GroupedValues grouped(dp, prior.mass());

  coders_.reserve(num_subsets);
  index_.resize(num_subsets);
  for (std::uint32_t bits = 0; bits < num_subsets; ++bits) {
    coders_.emplace_back(space, SenderSet::from_bits(bits));
  }

  // Nodes ordered by number of revealed senders, then subset, then code.
  for (int level = 0; level <= num_senders_; ++level) {
    for (std::uint32_t bits = 0; bits < num_subsets; ++bits) {
      const SenderSet subset = SenderSet::from_bits(bits);
      if (subset.size() != level) continue;
      const auto& cells = grouped.cells(subset);
      index_[bits].assign(cells.size(), npos);
      for (std::size_t code = 0; code < cells.size(); ++code) {
        if (cells[code].mass <= 0.0) continue;
        Node node;
        node.revealed = subset;
        node.realization = coders_[bits].decode(code);
        node.probability = cells[code].mass;
        node.stopping_value = cells[code].value / cells[code].mass;
        node.stop_action = cells[code].action;
        index_[bits][code] = nodes_.size();
        nodes_.push_back(std::move(node));
      }
    }
  }

  const std::size_t n = static_cast<std::size_t>(num_senders_);
  full_value_.assign(nodes_.size(), 0.0);
  residual_.assign(nodes_.size() * n, 0.0);
  expected_residual_.assign(nodes_.size() * n, 0.0);

  // Projects every cell of `from` onto the nodes of each subset S of `from`
  // and accumulates its value into out[id] (or out[slot(id, sender)]).
  auto project = [&](SenderSet from, SenderSet restrict_to, int sender, std::vector<double>& out,
                     double sign) {
    const auto& cells = grouped.cells(from);
    const SubsetCoder& from_coder = coders_[from.bits()];
    for (std::uint32_t bits = 0; bits < num_subsets; ++bits) {
      const SenderSet subset = SenderSet::from_bits(bits);
      if (!subset.is_subset_of(restrict_to)) continue;
      for (std::size_t code = 0; code < cells.size(); ++code) {
        if (cells[code].mass <= 0.0) continue;
        const auto digits = from_coder.decode(code);
        const std::size_t id = index_[bits][coders_[bits].code_of_digits(digits)];
        const std::size_t at = sender == 0 ? id : slot(id, sender);
        out[at] += sign * cells[code].value;
      }
    }
  };

  project(everyone, everyone, 0, full_value_, 1.0);
  for (int i = 1; i <= num_senders_; ++i) {
    const SenderSet others = everyone.without(i);
    // E[v-bar_i | w_S] * P(w_S) = sum g_N - sum g_{N-i} over cells extending w_S.
    project(everyone, others, i, expected_residual_, 1.0);
    project(others, others, i, expected_residual_, -1.0);
    // v-bar(w_i | w_S) * P(w_S) = sum_{w_i} g_{S+i} - g_S.
    for (std::uint32_t bits = 0; bits < num_subsets; ++bits) {
      const SenderSet subset = SenderSet::from_bits(bits);
      if (subset.contains(i)) continue;
      const SenderSet extended = subset.with(i);
      const auto& ext_cells = grouped.cells(extended);
      const SubsetCoder& ext_coder = coders_[extended.bits()];
      for (std::size_t code = 0; code < ext_cells.size(); ++code) {
        if (ext_cells[code].mass <= 0.0) continue;
        const auto digits = ext_coder.decode(code);
        const std::size_t id = index_[bits][coders_[bits].code_of_digits(digits)];
        residual_[slot(id, i)] += ext_cells[code].value;
      }
      const auto& cells = grouped.cells(subset);
      for (std::size_t code = 0; code < cells.size(); ++code) {
        if (cells[code].mass <= 0.0) continue;
        residual_[slot(index_[bits][code], i)] -= cells[code].value;
      }
    }
  }

  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const double p = nodes_[id].probability;
    full_value_[id] /= p;
    for (std::size_t k = 0; k < n; ++k) {
      residual_[id * n + k] /= p;
      expected_residual_[id * n + k] /= p;
    }
  }
}

std::size_t StateGraph::child(std::size_t id, int sender, int value) const {
  const Node& from = node(id);
  prior_.space().check_sender(sender);
  if (from.revealed.contains(sender)) {
    throw InvalidArgument("sender " + std::to_string(sender) + " already revealed");
  }
  const SenderSet next = from.revealed.with(sender);
  std::vector<int> digits = from.realization;
  digits[sender] = value;
  return index_[next.bits()][coders_[next.bits()].code_of_digits(digits)];
}

std::vector<std::pair<std::size_t, double>> StateGraph::transitions(std::size_t id,
                                                                    int sender) const {
  std::vector<std::pair<std::size_t, double>> out;
  const double p = node(id).probability;
  for (int v = 0; v < prior_.space().num_values(sender); ++v) {
    const std::size_t next = child(id, sender, v);
    if (next == npos) continue;
    out.emplace_back(next, nodes_[next].probability / p);
  }
  return out;
}

std::size_t StateGraph::find(SenderSet revealed, std::span<const int> digits) const {
  if (revealed.bits() >= index_.size()) return npos;
  return index_[revealed.bits()][coders_[revealed.bits()].code_of_digits(digits)];
}

double StateGraph::residual_value(std::size_t id, int sender) const {
  prior_.space().check_sender(sender);
  return residual_.at(slot(id, sender));
}

double StateGraph::expected_residual(std::size_t id, int sender) const {
  prior_.space().check_sender(sender);
  return expected_residual_.at(slot(id, sender));
}

double StateGraph::expected_full_stopping(std::size_t id) const { return full_value_.at(id); }

Belief StateGraph::belief(std::size_t id) const {
  const Node& n = node(id);
  Assignment assignment;
  for (int i : n.revealed.members()) assignment[i] = n.realization[i];
  return condition_on_components(prior_, assignment);
}

std::string StateGraph::describe(std::size_t id) const {
  const Node& n = node(id);
  if (n.revealed.empty()) return "-";
  std::string out;
  for (int i : n.revealed.members()) {
    if (!out.empty()) out += ';';
    const auto& comp = prior_.space().component(i);
    out += comp.name + "=" + comp.values[n.realization[i]];
  }
  return out;
}

}  // namespace attn
