#include <gtest/gtest.h>

#include <random>

#include "attn/catalog.h"
#include "attn/environment.h"
#include "attn/errors.h"
#include "oracle.h"

using namespace attn;

namespace {

double mass_at(const Belief& b, std::initializer_list<int> digits) {
  std::vector<int> d(digits);
  return b[b.space().encode(d)];
}

}  // namespace

TEST(JointSpace, RowMajorWithPayoffComponentMostSignificant) {
  JointSpace space(std::vector<ComponentSpace>{{"w0", {"a", "b"}}, {"s1", {"x", "y", "z"}}});
  EXPECT_EQ(space.num_states(), 6u);
  EXPECT_EQ(space.encode(std::vector<int>{1, 2}), 5u);
  EXPECT_EQ(space.value_index(4, 0), 1);
  EXPECT_EQ(space.value_index(4, 1), 1);
  EXPECT_EQ(space.state_label(3), "b;x");
}

TEST(JointSpace, RejectsEmptyAndDuplicateLabels) {
  EXPECT_THROW(JointSpace(std::vector<ComponentSpace>{{"w0", {}}}), InvalidArgument);
  EXPECT_THROW(JointSpace(std::vector<ComponentSpace>{{"w0", {"a", "a"}}}), InvalidArgument);
  JointSpace space(std::vector<ComponentSpace>{{"w0", {"a"}}, {"s", {"x"}}});
  EXPECT_THROW(space.find_value(1, "q"), UnknownComponent);
  EXPECT_THROW(space.check_sender(2), UnknownComponent);
}

TEST(JointPrior, ValidatesNormalisation) {
  auto space = std::make_shared<const JointSpace>(
      std::vector<ComponentSpace>{{"w0", {"a"}}, {"s", {"x", "y"}}});
  EXPECT_THROW(JointPrior(space, {0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(JointPrior(space, {1.2, -0.2}), InvalidArgument);
  EXPECT_NO_THROW(JointPrior(space, {0.5, 0.5}));
}

TEST(JointPrior, FromProductNamesTheBadRow) {
  auto space = std::make_shared<const JointSpace>(
      std::vector<ComponentSpace>{{"w0", {"a", "b"}}, {"s", {"x", "y"}}});
  const double marginal[] = {0.5, 0.5};
  try {
    JointPrior::from_product(space, marginal, {{{0.5, 0.5}, {0.6, 0.3}}});
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos) << e.what();
  }
}

TEST(Condition, CoinMatchGivenFirstCoin) {
  const Environment env = coin_match();
  const Belief b = condition_on_components(env.prior, make_assignment(env.prior.space(), {{1, "H"}}));
  EXPECT_DOUBLE_EQ(mass_at(b, {0, 0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(mass_at(b, {0, 0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(mass_at(b, {0, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(mass_at(b, {0, 1, 1}), 0.0);
}

TEST(Condition, PairGuessIndependence) {
  const Environment env = pair_guess(0.7);
  const Belief b = condition_on_components(env.prior, make_assignment(env.prior.space(), {{2, "T"}}));
  const auto m1 = b.marginal(1);
  EXPECT_NEAR(m1[0], 0.7, 1e-12);
  EXPECT_NEAR(m1[1], 0.3, 1e-12);
  EXPECT_NEAR(b.marginal(2)[1], 1.0, 1e-12);
}

TEST(Condition, BinarySignalBayes) {
  const Environment env = binary_signals(0.8, 1);
  const Belief b = condition_on_components(env.prior, {{1, 1}});
  EXPECT_NEAR(b.marginal(0)[1], 0.8, 1e-12);
}

TEST(Condition, Errors) {
  const Environment env = hypothesis_testing();
  // (H0, evidence H1) has zero mass, but conditioning on evidence alone is fine.
  EXPECT_NO_THROW(condition_on_components(env.prior, {{1, 1}}));
  const Environment cm = coin_match();
  EXPECT_THROW(condition_on_components(cm.prior, {{3, 0}}), UnknownComponent);
  EXPECT_THROW(condition_on_components(cm.prior, {{0, 0}}), UnknownComponent);
  auto space = std::make_shared<const JointSpace>(
      std::vector<ComponentSpace>{{"w0", {"a"}}, {"s", {"x", "y"}}});
  JointPrior degenerate(space, {1.0, 0.0});
  EXPECT_THROW(condition_on_components(degenerate, {{1, 1}}), ZeroMassEvent);
}

TEST(MessageDistribution, Examples) {
  const Environment env = coin_match();
  const auto& space = env.prior.space();
  const auto reveal = message_distribution(env.prior, Experiment::fully_revealing(space, 1));
  EXPECT_NEAR(reveal[0], 0.5, 1e-12);
  EXPECT_NEAR(reveal[1], 0.5, 1e-12);

  const Experiment aon = Experiment::all_or_nothing(space, 1, 0.2);
  ASSERT_EQ(aon.messages(), (std::vector<std::string>{"H", "T", "null"}));
  const auto dist = message_distribution(env.prior, aon);
  EXPECT_NEAR(dist[0], 0.1, 1e-12);
  EXPECT_NEAR(dist[1], 0.1, 1e-12);
  EXPECT_NEAR(dist[2], 0.8, 1e-12);

  const auto flat = message_distribution(env.prior, Experiment::uninformative(space, 2));
  ASSERT_EQ(flat.size(), 1u);
  EXPECT_DOUBLE_EQ(flat[0], 1.0);
}

TEST(Experiment, ValidatesKernel) {
  EXPECT_THROW(Experiment(1, {"m"}, {{0.5}}), InvalidArgument);
  EXPECT_THROW(Experiment(1, {"m", "m"}, {{0.5, 0.5}}), InvalidArgument);
  EXPECT_THROW(Experiment(0, {"m"}, {{1.0}}), InvalidArgument);
}

TEST(Update, RevealingEqualsConditioning) {
  const Environment env = coin_match();
  const auto& space = env.prior.space();
  const Belief a = update(env.prior, Experiment::fully_revealing(space, 1), "H");
  const Belief b = condition_on_components(env.prior, {{1, 0}});
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_NEAR(a[s], b[s], 1e-12);
}

TEST(Update, BinarySignal) {
  const Environment env = binary_signals(0.8, 1);
  const Belief b = update(env.prior, Experiment::fully_revealing(env.prior.space(), 1), "1");
  EXPECT_NEAR(b.marginal(0)[1], 0.8, 1e-12);
}

TEST(Update, NullMessageLeavesBeliefUnchanged) {
  const Environment env = pair_guess(0.7);
  const Belief b = update(env.prior, Experiment::all_or_nothing(env.prior.space(), 1, 0.2), "null");
  for (std::size_t s = 0; s < b.size(); ++s) EXPECT_NEAR(b[s], env.prior[s], 1e-12);
}

TEST(Update, ZeroProbabilityMessage) {
  const Environment env = hypothesis_testing();
  const Belief h0 = condition_on_components(env.prior, {{1, 0}});
  EXPECT_THROW(update(h0, Experiment::fully_revealing(env.prior.space(), 1), "H1"),
               ZeroProbabilityMessage);
}

TEST(NoDirectInfo, Examples) {
  const Environment env = pair_guess(0.7);
  const auto& space = env.prior.space();
  EXPECT_TRUE(no_direct_info(env.prior, env.prior, 1));
  const Belief after2 = update(env.prior, Experiment::fully_revealing(space, 2), "T");
  EXPECT_TRUE(no_direct_info(after2, env.prior, 1));
  const Belief after1 = update(env.prior, Experiment::all_or_nothing(space, 1, 0.2), "H");
  EXPECT_FALSE(no_direct_info(after1, env.prior, 1));
}

TEST(NoDirectInfo, NullMessageOfOwnAoNCarriesNoInformation) {
  const Environment env = binary_signals(0.8, 2);
  const auto& space = env.prior.space();
  const Belief b = update(env.prior, Experiment::all_or_nothing(space, 1, 0.3), "null");
  EXPECT_TRUE(no_direct_info(b, env.prior, 1));
  const Belief g = update(env.prior, Experiment::symmetric_channel(space, 1, 0.2), "1");
  EXPECT_FALSE(no_direct_info(g, env.prior, 1));
}

// --- properties on random environments -------------------------------------

class RandomEnvironments : public ::testing::TestWithParam<int> {};

TEST_P(RandomEnvironments, BeliefMartingale) {
  std::mt19937_64 gen(1000 + GetParam());
  const Environment env = oracle::random_environment(gen, {});
  const auto& space = env.prior.space();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 1; i <= space.num_senders(); ++i) {
    for (const Experiment& e : {Experiment::all_or_nothing(space, i, unit(gen)),
                                Experiment::symmetric_channel(space, i, unit(gen)),
                                Experiment::fully_revealing(space, i)}) {
      const auto dist = message_distribution(env.prior, e);
      double sum = 0.0;
      for (double p : dist) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      std::vector<double> mix(space.num_states(), 0.0);
      for (int m = 0; m < e.num_messages(); ++m) {
        if (dist[m] <= 0.0) continue;
        const Belief post = update(env.prior, e, m);
        EXPECT_TRUE(post.support_within(env.prior));
        for (std::size_t s = 0; s < mix.size(); ++s) mix[s] += dist[m] * post[s];
      }
      for (std::size_t s = 0; s < mix.size(); ++s) EXPECT_NEAR(mix[s], env.prior[s], 1e-10);
    }
  }
}

TEST_P(RandomEnvironments, UpdateMatchesOracle) {
  std::mt19937_64 gen(2000 + GetParam());
  const Environment env = oracle::random_environment(gen, {});
  const auto raw = oracle::raw(env);
  const auto& space = env.prior.space();
  const Experiment e = Experiment::symmetric_channel(space, 1, 0.3);
  std::vector<std::vector<double>> kernel(space.num_values(1));
  for (int v = 0; v < space.num_values(1); ++v) {
    for (int m = 0; m < e.num_messages(); ++m) kernel[v].push_back(e.likelihood(v, m));
  }
  const auto dist = message_distribution(env.prior, e);
  for (int m = 0; m < e.num_messages(); ++m) {
    if (dist[m] <= 0.0) continue;
    const Belief post = update(env.prior, e, m);
    const auto expected = oracle::posterior(raw, raw.mass, 1, kernel, m);
    for (std::size_t s = 0; s < expected.size(); ++s) EXPECT_NEAR(post[s], expected[s], 1e-12);
  }
}

TEST_P(RandomEnvironments, NoDirectInfoInvariantUnderOtherSendersExperiments) {
  std::mt19937_64 gen(3000 + GetParam());
  oracle::RandomEnvOptions opt;
  opt.num_senders = 3;
  opt.zero_probability = 0.0;
  const Environment env = oracle::random_environment(gen, opt);
  const auto& space = env.prior.space();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Belief b = env.prior.belief();
  for (int step = 0; step < 4; ++step) {
    const int j = 2 + step % 2;
    const Experiment e = step % 2 == 0 ? Experiment::symmetric_channel(space, j, unit(gen))
                                       : Experiment::all_or_nothing(space, j, unit(gen));
    const auto dist = message_distribution(b, e);
    std::discrete_distribution<int> pick(dist.begin(), dist.end());
    b = update(b, e, pick(gen));
    EXPECT_TRUE(no_direct_info(b, env.prior, 1)) << "step " << step;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomEnvironments, ::testing::Range(0, 20));
