#ifndef ATTN_SIMULATE_H_
#define ATTN_SIMULATE_H_

// Discrete-round game engine. Each round every sender posts an experiment,
// the receiver either consults one sender (paying c) or stops and acts.
// Stopping is final and there is no free waiting.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "attn/decision.h"
#include "attn/environment.h"
#include "attn/equilibrium.h"
#include "attn/state_graph.h"

namespace attn {

inline constexpr std::size_t kDefaultRoundCap = 1'000'000;

struct SenderPolicy {
  enum class Kind { kAonEquilibrium, kAonFixed, kEpsilonBoost, kUninformative, kCustomTable,
                    kCustomExperiment };
  // Experiment posted at the current belief; `round` counts from 1.
  using ExperimentFn = std::function<Experiment(const Belief& belief, std::size_t round)>;

  Kind kind = Kind::kAonEquilibrium;
  double rate = 0.0;          // kAonFixed
  double epsilon = 0.0;       // kEpsilonBoost: lambda* / (1 - epsilon)
  std::vector<double> table;  // kCustomTable: AoN rate per state-graph node
  ExperimentFn experiment;    // kCustomExperiment

  static SenderPolicy aon_equilibrium();
  static SenderPolicy aon_fixed(double rate);
  static SenderPolicy epsilon_boost(double epsilon);
  static SenderPolicy uninformative();
  static SenderPolicy custom_table(std::vector<double> table);
  static SenderPolicy custom_experiment(ExperimentFn fn);

  bool is_aon() const { return kind != Kind::kCustomExperiment; }
  std::string describe() const;
};

struct ReceiverPolicy {
  enum class Kind { kEquilibriumOrder, kDpOptimal, kGreedyMyopic, kStopAlways };
  enum class Order { kLowestIndex, kReversed, kRandom, kPermutation };

  Kind kind = Kind::kEquilibriumOrder;
  Order order = Order::kLowestIndex;
  std::vector<int> permutation;  // kPermutation: senders in visiting order
  bool prefer_continue = false;  // kDpOptimal tie-break

  static ReceiverPolicy equilibrium_order(Order order = Order::kLowestIndex);
  static ReceiverPolicy explicit_order(std::vector<int> permutation);
  static ReceiverPolicy dp_optimal(bool prefer_continue = false);
  static ReceiverPolicy greedy_myopic();
  static ReceiverPolicy stop_always();

  // "lowest", "reversed", "random" or "perm:2,1,3".
  static Order parse_order(const std::string& text, std::vector<int>* permutation);
  std::string describe() const;
};

// Solution of the receiver's stopping/consultation problem on the state graph
// against fixed AoN rate tables.
struct ReceiverDp {
  std::vector<double> value;       // V per node
  std::vector<int> choice;         // 0 = stop, otherwise the sender consulted
  std::vector<bool> stop_optimal;  // U(node) attains V
  std::vector<bool> continue_optimal;
  std::vector<double> continuation;  // best consult value; -inf if nobody offers
};

inline constexpr double kDpTieTolerance = 1e-9;

// rates[i-1][node]; a rate of 0 means sender i offers nothing there.
ReceiverDp solve_receiver_dp(const StateGraph& graph, double cost,
                             const std::vector<std::vector<double>>& rates,
                             bool prefer_continue = false);

struct RoundRecord {
  std::size_t round = 0;
  int sender = 0;
  double offer = 0.0;  // AoN rate offered by the consulted sender; NaN if not AoN
  std::string message;
  bool revealed = false;
  std::size_t node = StateGraph::npos;  // graph node after the round
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::size_t state = 0;
  std::string state_label;
  std::vector<RoundRecord> rounds;  // empty unless recorded
  std::vector<std::size_t> visits;  // per sender
  std::size_t total_rounds = 0;
  double cost = 0.0;
  double utility = 0.0;  // u(stop action, state)
  double payoff = 0.0;   // utility - cost
  int stop_action = 0;
  std::size_t final_node = StateGraph::npos;
};

struct EpisodeOptions {
  std::size_t round_cap = kDefaultRoundCap;
  bool record_rounds = true;
};

struct MonteCarloSummary {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<double> mean_visits;
  std::vector<double> se_visits;
  double mean_payoff = 0.0;
  double se_payoff = 0.0;
  double mean_utility = 0.0;
  double mean_cost = 0.0;
  double mean_rounds = 0.0;
  std::map<std::size_t, std::size_t> stopping_times;  // total rounds -> count
  std::vector<EpisodeTrace> episodes;                 // rounds not recorded
};

class Simulator {
 public:
  // A profile is built (forced) from the environment when any sender plays
  // the equilibrium or epsilon-boost policy and none is supplied.
  Simulator(const DecisionProblem& dp, const JointPrior& prior, double cost,
            std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
            std::shared_ptr<const EquilibriumProfile> profile = nullptr);

  EpisodeTrace run_episode(std::uint64_t seed, const EpisodeOptions& options = {}) const;
  // Episode k uses derive_seed(seed, k).
  MonteCarloSummary monte_carlo(std::size_t replications, std::uint64_t seed,
                                const EpisodeOptions& options = {kDefaultRoundCap, false}) const;

  const StateGraph& graph() const { return *graph_; }
  bool all_aon() const { return all_aon_; }
  // Only available when every sender plays an AoN policy.
  const std::vector<std::vector<double>>& rate_tables() const;
  // Only available for the dp-optimal receiver.
  const ReceiverDp& receiver_dp() const;

 private:
  int choose(const Belief* belief, std::size_t node, SenderSet revealed,
             const std::vector<int>& order, std::size_t round) const;
  double policy_rate(int sender, std::size_t node) const;
  double rate_at(int sender, std::size_t node, const Belief* belief) const;

  DecisionProblem dp_;
  JointPrior prior_;
  double cost_;
  std::vector<SenderPolicy> senders_;
  ReceiverPolicy receiver_;
  std::shared_ptr<const EquilibriumProfile> profile_;
  std::shared_ptr<const StateGraph> graph_;
  bool all_aon_ = true;
  std::vector<std::vector<double>> rates_;
  std::shared_ptr<const ReceiverDp> dp_solution_;
  std::vector<double> cumulative_;
};

EpisodeTrace run_episode(const DecisionProblem& dp, const JointPrior& prior, double cost,
                         std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
                         std::uint64_t seed, const EpisodeOptions& options = {});

MonteCarloSummary monte_carlo(const DecisionProblem& dp, const JointPrior& prior, double cost,
                              std::vector<SenderPolicy> senders, ReceiverPolicy receiver,
                              std::size_t replications, std::uint64_t seed);

struct HoldupReport {
  double cost = 0.0;
  double sender1_value_at_prior = 0.0;     // v-bar(w_1 | mu^0)
  double sender2_residual_value = 0.0;     // v-bar(w_2 | w_1)
  double sender2_continuation_visits = 0.0;
  double receiver_value = 0.0;             // dp-optimal V(mu^0)
  double stopping_value = 0.0;             // U(mu^0)
  double best_continuation_value = 0.0;    // best consult value over sender-1 offers tried
  bool stop_strictly_optimal = false;
  double partial_info_value = 0.0;         // v-bar(w_2 | P(w_1 = H) = 0.75)
  std::vector<double> sender1_offers;
};

// Coin-match hold-up: against any AoN offer by sender 1 and sender 2's
// residual-monopoly continuation the receiver never consults.
HoldupReport holdup_demo(double cost);

}  // namespace attn

#endif  // ATTN_SIMULATE_H_
