#include "attn/simulate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "attn/catalog.h"
#include "attn/errors.h"
#include "attn/rng.h"

namespace attn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_rate(double r) {
  if (std::isnan(r)) return 0.0;
  return std::clamp(r, 0.0, 1.0);
}

bool is_permutation_of_senders(const std::vector<int>& perm, int n) {
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[i] != i + 1) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Policies

SenderPolicy SenderPolicy::aon_equilibrium() { return {}; }

SenderPolicy SenderPolicy::aon_fixed(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("AoN rate must lie in [0, 1]");
  SenderPolicy p;
  p.kind = Kind::kAonFixed;
  p.rate = rate;
  return p;
}

SenderPolicy SenderPolicy::epsilon_boost(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  SenderPolicy p;
  p.kind = Kind::kEpsilonBoost;
  p.epsilon = epsilon;
  return p;
}

SenderPolicy SenderPolicy::uninformative() {
  SenderPolicy p;
  p.kind = Kind::kUninformative;
  return p;
}

SenderPolicy SenderPolicy::custom_table(std::vector<double> table) {
  for (double r : table) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("table rates must lie in [0, 1]");
  }
  SenderPolicy p;
  p.kind = Kind::kCustomTable;
  p.table = std::move(table);
  return p;
}

SenderPolicy SenderPolicy::custom_experiment(ExperimentFn fn) {
  if (!fn) throw InvalidArgument("custom experiment policy needs a function");
  SenderPolicy p;
  p.kind = Kind::kCustomExperiment;
  p.experiment = std::move(fn);
  return p;
}

std::string SenderPolicy::describe() const {
  switch (kind) {
    case Kind::kAonEquilibrium:
      return "aon-equilibrium";
    case Kind::kAonFixed:
      return "aon-fixed(" + std::to_string(rate) + ")";
    case Kind::kEpsilonBoost:
      return "epsilon-boost(" + std::to_string(epsilon) + ")";
    case Kind::kUninformative:
      return "uninformative";
    case Kind::kCustomTable:
      return "custom-table";
    case Kind::kCustomExperiment:
      return "custom-experiment";
  }
  return "?";
}

ReceiverPolicy ReceiverPolicy::equilibrium_order(Order order) {
  ReceiverPolicy p;
  p.order = order;
  return p;
}

ReceiverPolicy ReceiverPolicy::explicit_order(std::vector<int> permutation) {
  ReceiverPolicy p;
  p.order = Order::kPermutation;
  p.permutation = std::move(permutation);
  return p;
}

ReceiverPolicy ReceiverPolicy::dp_optimal(bool prefer_continue) {
  ReceiverPolicy p;
  p.kind = Kind::kDpOptimal;
  p.prefer_continue = prefer_continue;
  return p;
}

ReceiverPolicy ReceiverPolicy::greedy_myopic() {
  ReceiverPolicy p;
  p.kind = Kind::kGreedyMyopic;
  return p;
}

ReceiverPolicy ReceiverPolicy::stop_always() {
  ReceiverPolicy p;
  p.kind = Kind::kStopAlways;
  return p;
}

ReceiverPolicy::Order ReceiverPolicy::parse_order(const std::string& text,
                                                  std::vector<int>* permutation) {
  if (text == "lowest") return Order::kLowestIndex;
  if (text == "reversed") return Order::kReversed;
  if (text == "random") return Order::kRandom;
  if (text.rfind("perm:", 0) == 0) {
    std::vector<int> perm;
    std::stringstream in(text.substr(5));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        perm.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("bad sender index '" + item + "' in receiver order");
      }
    }
    if (perm.empty()) throw InvalidArgument("empty permutation in receiver order");
    if (permutation) *permutation = std::move(perm);
    return Order::kPermutation;
  }
  throw InvalidArgument("unknown receiver order '" + text +
                        "' (expected lowest, reversed, random or perm:i,j,...)");
}

std::string ReceiverPolicy::describe() const {
  switch (kind) {
    case Kind::kDpOptimal:
      return prefer_continue ? "dp-optimal(continue-on-tie)" : "dp-optimal";
    case Kind::kGreedyMyopic:
      return "greedy-myopic";
    case Kind::kStopAlways:
      return "stop-always";
    case Kind::kEquilibriumOrder:
      break;
  }
  switch (order) {
    case Order::kLowestIndex:
      return "equilibrium-order(lowest)";
    case Order::kReversed:
      return "equilibrium-order(reversed)";
    case Order::kRandom:
      return "equilibrium-order(random)";
    case Order::kPermutation: {
      std::string out = "equilibrium-order(perm:";
      for (std::size_t k = 0; k < permutation.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(permutation[k]);
      }
      return out + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Receiver dynamic programme

ReceiverDp solve_receiver_dp(const StateGraph& graph, double cost,
                             const std::vector<std::vector<double>>& rates,
                             bool prefer_continue) {
  const int n = graph.num_senders();
  if (static_cast<int>(rates.size()) != n) {
    throw NonAoNPolicy("receiver programme needs an AoN rate table for every sender");
  }
  for (const auto& table : rates) {
    if (table.size() != graph.size()) {
      throw NonAoNPolicy("AoN rate table does not cover the state graph");
    }
  }
  const std::size_t size = graph.size();
  ReceiverDp out;
  out.value.assign(size, 0.0);
  out.choice.assign(size, 0);
  out.stop_optimal.assign(size, true);
  out.continue_optimal.assign(size, false);
  out.continuation.assign(size, kNegInf);

  // Children always reveal one more sender, so they come later in node order.
  for (std::size_t k = size; k-- > 0;) {
    const auto& node = graph.node(k);
    const double stop = node.stopping_value;
    double best = kNegInf;
    int best_sender = 0;
    for (int i = 1; i <= n; ++i) {
      if (node.revealed.contains(i)) continue;
      const double r = rates[i - 1][k];
      if (!(r > 0.0)) continue;
      double ev = 0.0;
      for (const auto& [next, prob] : graph.transitions(k, i)) ev += prob * out.value[next];
      const double cont = ev - cost / std::min(r, 1.0);
      const double scale = std::max({1.0, std::abs(cont), std::abs(best == kNegInf ? 0.0 : best)});
      if (best_sender == 0 || cont > best + kDpTieTolerance * scale) {
        best = cont;
        best_sender = i;
      }
    }
    out.continuation[k] = best;
    const double scale = std::max({1.0, std::abs(stop), std::abs(best_sender ? best : 0.0)});
    const bool cont_ok = best_sender != 0 && best >= stop - kDpTieTolerance * scale;
    const bool stop_ok = best_sender == 0 || stop >= best - kDpTieTolerance * scale;
    out.stop_optimal[k] = stop_ok;
    out.continue_optimal[k] = cont_ok;
    const bool go = cont_ok && (!stop_ok || prefer_continue);
    out.choice[k] = go ? best_sender : 0;
    out.value[k] = best_sender ? std::max(stop, best) : stop;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(const DecisionProblem& dp, const JointPrior& prior, double cost,
                     std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
                     std::shared_ptr<const EquilibriumProfile> profile)
    : dp_(dp),
      prior_(prior),
      cost_(cost),
      senders_(std::move(senders)),
      receiver_(std::move(receiver)),
      profile_(std::move(profile)) {
  const int n = prior_.space().num_senders();
  if (!(cost_ > 0.0)) throw InvalidArgument("attention cost must be positive");
  if (static_cast<int>(senders_.size()) != n) {
    throw InvalidArgument("need one sender policy per sender (" + std::to_string(n) + "), got " +
                          std::to_string(senders_.size()));
  }
  if (receiver_.kind == ReceiverPolicy::Kind::kEquilibriumOrder &&
      receiver_.order == ReceiverPolicy::Order::kPermutation &&
      !is_permutation_of_senders(receiver_.permutation, n)) {
    throw InvalidArgument("receiver order is not a permutation of the senders 1.." +
                          std::to_string(n));
  }

  bool needs_profile = false;
  for (const auto& s : senders_) {
    all_aon_ = all_aon_ && s.is_aon();
    needs_profile = needs_profile || s.kind == SenderPolicy::Kind::kAonEquilibrium ||
                    s.kind == SenderPolicy::Kind::kEpsilonBoost;
  }
  if (needs_profile && !profile_) {
    ProfileOptions force;
    force.force = true;
    profile_ = std::make_shared<const EquilibriumProfile>(aon_rates(dp_, prior_, cost_, force));
  }
  graph_ = profile_ ? profile_->graph_ptr() : std::make_shared<const StateGraph>(dp_, prior_);
  if (profile_ && std::abs(profile_->cost() - cost_) > 0.0) {
    throw InvalidArgument("equilibrium profile was built for a different cost");
  }

  for (int i = 1; i <= n; ++i) {
    const auto& s = senders_[i - 1];
    if (s.kind == SenderPolicy::Kind::kCustomTable && s.table.size() != graph_->size()) {
      throw InvalidArgument("custom rate table for sender " + std::to_string(i) + " has " +
                            std::to_string(s.table.size()) + " entries, state graph has " +
                            std::to_string(graph_->size()));
    }
  }
  if (all_aon_) {
    rates_.assign(n, std::vector<double>(graph_->size(), 0.0));
    for (int i = 1; i <= n; ++i) {
      for (std::size_t id = 0; id < graph_->size(); ++id) {
        if (!graph_->node(id).revealed.contains(i)) rates_[i - 1][id] = policy_rate(i, id);
      }
    }
  }
  if (receiver_.kind == ReceiverPolicy::Kind::kDpOptimal) {
    if (!all_aon_) {
      throw NonAoNPolicy("the dp-optimal receiver needs every sender to play an AoN policy");
    }
    dp_solution_ = std::make_shared<const ReceiverDp>(
        solve_receiver_dp(*graph_, cost_, rates_, receiver_.prefer_continue));
  }

  cumulative_.resize(prior_.space().num_states());
  std::partial_sum(prior_.mass().begin(), prior_.mass().end(), cumulative_.begin());
}

const std::vector<std::vector<double>>& Simulator::rate_tables() const {
  if (!all_aon_) throw NonAoNPolicy("some sender does not play an AoN policy");
  return rates_;
}

const ReceiverDp& Simulator::receiver_dp() const {
  if (!dp_solution_) throw InvalidArgument("receiver is not dp-optimal");
  return *dp_solution_;
}

double Simulator::policy_rate(int sender, std::size_t node) const {
  const auto& s = senders_[sender - 1];
  switch (s.kind) {
    case SenderPolicy::Kind::kAonEquilibrium:
      return clamp_rate(profile_->rate(node, sender));
    case SenderPolicy::Kind::kEpsilonBoost:
      return clamp_rate(profile_->rate(node, sender) / (1.0 - s.epsilon));
    case SenderPolicy::Kind::kAonFixed:
      return s.rate;
    case SenderPolicy::Kind::kUninformative:
      return 0.0;
    case SenderPolicy::Kind::kCustomTable:
      return s.table[node];
    case SenderPolicy::Kind::kCustomExperiment:
      break;
  }
  return kNaN;
}

double Simulator::rate_at(int sender, std::size_t node, const Belief* belief) const {
  if (node != StateGraph::npos) return all_aon_ ? rates_[sender - 1][node] : policy_rate(sender, node);
  const auto& s = senders_[sender - 1];
  switch (s.kind) {
    case SenderPolicy::Kind::kAonEquilibrium:
    case SenderPolicy::Kind::kEpsilonBoost: {
      const double value = expected_residual_value(dp_, *belief, sender);
      const double boost = s.kind == SenderPolicy::Kind::kEpsilonBoost ? 1.0 - s.epsilon : 1.0;
      return value > 0.0 ? clamp_rate(cost_ / value / boost) : 1.0;
    }
    case SenderPolicy::Kind::kCustomTable:
      throw NonAoNPolicy("custom rate table is undefined off the state graph");
    default:
      return policy_rate(sender, node);
  }
}

int Simulator::choose(const Belief* belief, std::size_t node, SenderSet revealed,
                      const std::vector<int>& order, std::size_t round) const {
  const int n = graph_->num_senders();
  switch (receiver_.kind) {
    case ReceiverPolicy::Kind::kStopAlways:
      return 0;
    case ReceiverPolicy::Kind::kEquilibriumOrder:
      for (int i : order) {
        if (!revealed.contains(i)) return i;
      }
      return 0;
    case ReceiverPolicy::Kind::kDpOptimal:
      return dp_solution_->choice[node];
    case ReceiverPolicy::Kind::kGreedyMyopic: {
      int best = 0;
      double best_gain = 0.0;
      for (int i = 1; i <= n; ++i) {
        if (revealed.contains(i)) continue;
        double value = 0.0;
        if (senders_[i - 1].is_aon()) {
          const double reveal = node != StateGraph::npos ? graph_->residual_value(node, i)
                                                         : full_reveal_value(dp_, *belief, i);
          value = rate_at(i, node, belief) * reveal;
        } else {
          value = experiment_value(dp_, *belief, senders_[i - 1].experiment(*belief, round));
        }
        const double gain = value - cost_;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = i;
        }
      }
      return best;
    }
  }
  return 0;
}

EpisodeTrace Simulator::run_episode(std::uint64_t seed, const EpisodeOptions& options) const {
  const JointSpace& space = prior_.space();
  const int n = space.num_senders();
  Rng rng(seed);
  EpisodeTrace trace;
  trace.seed = seed;
  trace.visits.assign(n, 0);

  const double draw = rng.uniform() * cumulative_.back();
  trace.state = static_cast<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), draw) - cumulative_.begin());
  trace.state = std::min(trace.state, cumulative_.size() - 1);
  while (prior_[trace.state] <= 0.0 && trace.state > 0) --trace.state;
  trace.state_label = space.state_label(trace.state);
  const std::vector<int> digits = space.decode(trace.state);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  if (receiver_.kind == ReceiverPolicy::Kind::kEquilibriumOrder) {
    switch (receiver_.order) {
      case ReceiverPolicy::Order::kLowestIndex:
        break;
      case ReceiverPolicy::Order::kReversed:
        std::reverse(order.begin(), order.end());
        break;
      case ReceiverPolicy::Order::kRandom:
        for (int k = n - 1; k > 0; --k) {
          std::swap(order[k], order[rng.below(static_cast<std::size_t>(k) + 1)]);
        }
        break;
      case ReceiverPolicy::Order::kPermutation:
        order = receiver_.permutation;
        break;
    }
  }

  std::size_t node = StateGraph::root();
  SenderSet revealed;
  std::unique_ptr<Belief> belief;
  if (!all_aon_) belief = std::make_unique<Belief>(prior_.belief());

  for (std::size_t round = 1;; ++round) {
    const int d = choose(belief.get(), node, revealed, order, round);
    if (d == 0) break;
    if (round > options.round_cap) {
      throw RoundLimitExceeded("episode with seed " + std::to_string(seed) + " exceeded " +
                               std::to_string(options.round_cap) + " rounds");
    }
    ++trace.visits[d - 1];
    ++trace.total_rounds;
    trace.cost += cost_;
    RoundRecord record;
    record.round = round;
    record.sender = d;
    const auto& policy = senders_[d - 1];
    if (policy.is_aon()) {
      const double r = revealed.contains(d) ? 0.0 : rate_at(d, node, belief.get());
      record.offer = r;
      if (rng.uniform() < r) {
        record.revealed = true;
        record.message = space.component(d).values[digits[d]];
        revealed = revealed.with(d);
        if (node != StateGraph::npos) node = graph_->child(node, d, digits[d]);
        if (belief) *belief = condition_on_components(*belief, {{d, digits[d]}});
      } else {
        record.message = std::string(Experiment::kNullMessage);
      }
    } else {
      const Experiment e = policy.experiment(*belief, round);
      if (e.sender() != d) {
        throw InvalidArgument("custom policy of sender " + std::to_string(d) +
                              " produced an experiment for sender " + std::to_string(e.sender()));
      }
      record.offer = kNaN;
      std::vector<double> row(e.num_messages());
      for (int m = 0; m < e.num_messages(); ++m) row[m] = e.likelihood(digits[d], m);
      const int m = static_cast<int>(rng.categorical(row));
      record.message = e.messages()[m];
      *belief = update(*belief, e, m);
      node = StateGraph::npos;
    }
    record.node = node;
    if (options.record_rounds) trace.rounds.push_back(std::move(record));
  }

  trace.final_node = node;
  trace.stop_action = node != StateGraph::npos ? graph_->node(node).stop_action
                                               : stopping_utility(dp_, *belief).optimal_action;
  trace.utility = dp_.utility(trace.stop_action, trace.state);
  trace.payoff = trace.utility - trace.cost;
  return trace;
}

MonteCarloSummary Simulator::monte_carlo(std::size_t replications, std::uint64_t seed,
                                         const EpisodeOptions& options) const {
  if (replications < 1) throw InvalidArgument("need at least one replication");
  const int n = graph_->num_senders();
  MonteCarloSummary out;
  out.replications = replications;
  out.seed = seed;
  out.episodes.reserve(replications);
  for (std::size_t k = 0; k < replications; ++k) {
    out.episodes.push_back(run_episode(derive_seed(seed, k), options));
  }

  const double r = static_cast<double>(replications);
  auto mean_se = [&](auto get) {
    double sum = 0.0;
    for (const auto& e : out.episodes) sum += get(e);
    const double mean = sum / r;
    double ss = 0.0;
    for (const auto& e : out.episodes) ss += (get(e) - mean) * (get(e) - mean);
    const double sd = replications > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
    return std::pair<double, double>{mean, sd / std::sqrt(r)};
  };
  for (int i = 0; i < n; ++i) {
    const auto [m, se] = mean_se([i](const EpisodeTrace& e) { return double(e.visits[i]); });
    out.mean_visits.push_back(m);
    out.se_visits.push_back(se);
  }
  std::tie(out.mean_payoff, out.se_payoff) = mean_se([](const EpisodeTrace& e) { return e.payoff; });
  out.mean_utility = mean_se([](const EpisodeTrace& e) { return e.utility; }).first;
  out.mean_cost = mean_se([](const EpisodeTrace& e) { return e.cost; }).first;
  out.mean_rounds = mean_se([](const EpisodeTrace& e) { return double(e.total_rounds); }).first;
  for (const auto& e : out.episodes) ++out.stopping_times[e.total_rounds];
  return out;
}

EpisodeTrace run_episode(const DecisionProblem& dp, const JointPrior& prior, double cost,
                         std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
                         std::uint64_t seed, const EpisodeOptions& options) {
  return Simulator(dp, prior, cost, std::move(senders), std::move(receiver))
      .run_episode(seed, options);
}

MonteCarloSummary monte_carlo(const DecisionProblem& dp, const JointPrior& prior, double cost,
                              std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
                              std::size_t replications, std::uint64_t seed) {
  return Simulator(dp, prior, cost, std::move(senders), std::move(receiver))
      .monte_carlo(replications, seed);
}

// ---------------------------------------------------------------------------
// Hold-up

HoldupReport holdup_demo(double cost) {
  if (!(cost > 0.0 && cost < 0.5)) throw InvalidArgument("hold-up demo needs 0 < c < 0.5");
  const Environment env = coin_match();
  ProfileOptions force;
  force.force = true;
  const EquilibriumProfile profile = aon_rates(env.dp, env.prior, cost, force);
  const StateGraph& graph = profile.graph();

  HoldupReport report;
  report.cost = cost;
  report.sender1_value_at_prior = graph.residual_value(StateGraph::root(), 1);
  const std::size_t heads = graph.child(StateGraph::root(), 1, 0);
  report.sender2_residual_value = graph.residual_value(heads, 2);
  report.sender2_continuation_visits = report.sender2_residual_value / cost;
  report.stopping_value = graph.node(StateGraph::root()).stopping_value;

  // Sender 2 plays the residual-monopoly rate c / v-bar(w_2 | .) everywhere.
  std::vector<double> sender2(graph.size(), 0.0);
  for (std::size_t id = 0; id < graph.size(); ++id) {
    if (!graph.node(id).revealed.contains(2)) sender2[id] = clamp_rate(profile.rate(id, 2));
  }
  report.stop_strictly_optimal = true;
  report.receiver_value = kNegInf;
  report.best_continuation_value = kNegInf;
  for (int k = 1; k <= 20; ++k) {
    const double offer = 0.05 * k;
    report.sender1_offers.push_back(offer);
    std::vector<double> sender1(graph.size(), 0.0);
    for (std::size_t id = 0; id < graph.size(); ++id) {
      if (!graph.node(id).revealed.contains(1)) sender1[id] = offer;
    }
    const ReceiverDp dp = solve_receiver_dp(graph, cost, {sender1, sender2});
    const std::size_t root = StateGraph::root();
    report.receiver_value = std::max(report.receiver_value, dp.value[root]);
    report.best_continuation_value = std::max(report.best_continuation_value, dp.continuation[root]);
    report.stop_strictly_optimal =
        report.stop_strictly_optimal && dp.stop_optimal[root] && !dp.continue_optimal[root];
  }

  const Belief partial(env.prior.space_ptr(), {0.375, 0.375, 0.125, 0.125});
  report.partial_info_value = full_reveal_value(env.dp, partial, 2);
  return report;
}

}  // namespace attn
