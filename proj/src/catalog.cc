#include "attn/catalog.h"

#include <memory>

#include "attn/errors.h"

namespace attn {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Environment coin_match() {
  auto space = std::make_shared<const JointSpace>(std::vector<ComponentSpace>{
      {"state", {"-"}}, {"coin1", {"H", "T"}}, {"coin2", {"H", "T"}}});
  JointPrior prior(space, {0.25, 0.25, 0.25, 0.25});
  std::vector<std::vector<double>> utility(2, std::vector<double>(4));
  for (std::size_t s = 0; s < 4; ++s) {
    const bool same = space->value_index(s, 1) == space->value_index(s, 2);
    utility[0][s] = same ? 1.0 : 0.0;
    utility[1][s] = same ? 0.0 : 1.0;
  }
  DecisionProblem dp(space, {"match", "mismatch"}, std::move(utility));
  return {"coin-match", std::move(prior), std::move(dp)};
}

Environment pair_guess(double q) {
  check_probability(q, "q");
  auto space = std::make_shared<const JointSpace>(std::vector<ComponentSpace>{
      {"state", {"-"}}, {"coin1", {"H", "T"}}, {"coin2", {"H", "T"}}});
  const std::vector<double> row{q, 1.0 - q};
  const double marginal[] = {1.0};
  JointPrior prior = JointPrior::from_product(space, marginal, {{row}, {row}});
  const std::vector<std::string> actions{"HH", "HT", "TH", "TT"};
  std::vector<std::vector<double>> utility(4, std::vector<double>(4));
  for (int a = 0; a < 4; ++a) {
    for (std::size_t s = 0; s < 4; ++s) {
      const int g1 = a / 2;
      const int g2 = a % 2;
      utility[a][s] = (g1 == space->value_index(s, 1) ? 1.0 : 0.0) +
                      (g2 == space->value_index(s, 2) ? 1.0 : 0.0);
    }
  }
  DecisionProblem dp(space, actions, std::move(utility));
  return {"pair-guess", std::move(prior), std::move(dp)};
}

Environment hypothesis_testing(double alpha, double beta, double q) {
  check_probability(q, "q");
  if (alpha < 0.0 || beta < 0.0) throw InvalidArgument("error costs must be non-negative");
  auto space = std::make_shared<const JointSpace>(
      std::vector<ComponentSpace>{{"hypothesis", {"H0", "H1"}}, {"evidence", {"H0", "H1"}}});
  const double marginal[] = {1.0 - q, q};
  JointPrior prior = JointPrior::from_product(space, marginal, {{{1.0, 0.0}, {0.0, 1.0}}});
  // action 0 accepts H0, action 1 rejects it
  DecisionProblem dp = DecisionProblem::over_payoff_state(space, {"accept", "reject"},
                                                          {{0.0, -beta}, {-alpha, 0.0}});
  return {"hypothesis-testing", std::move(prior), std::move(dp)};
}

Environment binary_signals(double accuracy, int num_senders, double abstain, double prior_one) {
  check_probability(accuracy, "accuracy");
  check_probability(prior_one, "prior");
  if (num_senders < 1) throw InvalidArgument("need at least one signal");
  std::vector<ComponentSpace> components{{"state", {"0", "1"}}};
  for (int i = 1; i <= num_senders; ++i) {
    components.push_back({"signal" + std::to_string(i), {"0", "1"}});
  }
  auto space = std::make_shared<const JointSpace>(std::move(components));
  const std::vector<std::vector<double>> rows{{accuracy, 1.0 - accuracy},
                                              {1.0 - accuracy, accuracy}};
  const double marginal[] = {1.0 - prior_one, prior_one};
  JointPrior prior = JointPrior::from_product(
      space, marginal, std::vector<std::vector<std::vector<double>>>(num_senders, rows));
  DecisionProblem dp = DecisionProblem::over_payoff_state(
      space, {"guess-0", "guess-1", "abstain"}, {{1.0, 0.0}, {0.0, 1.0}, {abstain, abstain}});
  return {"binary-signals", std::move(prior), std::move(dp)};
}

}  // namespace attn
