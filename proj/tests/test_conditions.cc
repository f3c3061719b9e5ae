#include <gtest/gtest.h>

#include <random>

#include "attn/catalog.h"
#include "attn/conditions.h"
#include "attn/errors.h"
#include "oracle.h"

using namespace attn;

TEST(VisitWorth, CoinMatchHolds) {
  const Environment env = coin_match();
  const ConditionReport r = check_visit_worth(env.dp, env.prior, 0.1);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.witnesses.empty());
  EXPECT_NEAR(r.margin, 0.4, 1e-12);
  EXPECT_EQ(r.checked, 4u);
}

TEST(VisitWorth, PairGuess) {
  const Environment env = pair_guess(0.7);
  const ConditionReport ok = check_visit_worth(env.dp, env.prior, 0.1);
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.margin, 0.2, 1e-12);
  const ConditionReport bad = check_visit_worth(env.dp, env.prior, 0.5);
  EXPECT_FALSE(bad.holds);
  bool saw1 = false, saw2 = false;
  for (const auto& w : bad.witnesses) {
    EXPECT_DOUBLE_EQ(w.lhs, 0.5);
    EXPECT_NEAR(w.rhs, 0.3, 1e-12);
    saw1 = saw1 || w.context.rfind("sender 1", 0) == 0;
    saw2 = saw2 || w.context.rfind("sender 2", 0) == 0;
  }
  EXPECT_TRUE(saw1 && saw2);
}

TEST(VisitWorth, MonopolyCase) {
  const Environment env = hypothesis_testing();
  EXPECT_TRUE(check_visit_worth(env.dp, env.prior, 0.1).holds);
  EXPECT_FALSE(check_visit_worth(env.dp, env.prior, 0.5).holds);
  EXPECT_THROW(check_visit_worth(env.dp, env.prior, 0.0), InvalidArgument);
}

TEST(Substitutes, CoinMatchFailsAtPrior) {
  const Environment env = coin_match();
  const ConditionReport r = check_substitutes(env.dp, env.prior);
  EXPECT_FALSE(r.holds);
  int at_prior = 0;
  for (const auto& w : r.witnesses) {
    if (w.context.find("w_S = -") == std::string::npos) continue;
    ++at_prior;
    EXPECT_NEAR(w.lhs, 0.0, 1e-15);
    EXPECT_NEAR(w.rhs, 0.5, 1e-12);
  }
  EXPECT_EQ(at_prior, 2);
  EXPECT_NEAR(r.margin, -0.5, 1e-12);
}

TEST(Substitutes, PairGuessHoldsWithZeroMargin) {
  const Environment env = pair_guess(0.7);
  const ConditionReport r = check_substitutes(env.dp, env.prior, 200, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.margin, 0.0);
  ASSERT_EQ(r.layers.size(), 2u);
  EXPECT_EQ(r.layers[1].name, "sampled");
  EXPECT_EQ(r.layers[1].checked, 200u);
}

TEST(Substitutes, SingleSenderHoldsVacuously) {
  const Environment env = hypothesis_testing();
  const ConditionReport r = check_substitutes(env.dp, env.prior, 10);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_EQ(r.layers[0].checked, 1u);
}

TEST(Substitutes, DeterministicGivenSeed) {
  const Environment env = binary_signals(0.8, 3);
  const ConditionReport a = check_substitutes(env.dp, env.prior, 50, 11);
  const ConditionReport b = check_substitutes(env.dp, env.prior, 50, 11);
  EXPECT_EQ(a.margin, b.margin);
  EXPECT_EQ(a.layers[1].margin, b.layers[1].margin);
  EXPECT_EQ(a.witnesses.size(), b.witnesses.size());
}

TEST(MNatural, CoinMatchWitness) {
  const Environment env = coin_match();
  const ConditionReport r = check_mnat_concave(env.dp, env.prior);
  EXPECT_FALSE(r.holds);
  bool found = false;
  for (const auto& w : r.witnesses) {
    if (w.context == "S=1;2 T=- s=1") {
      found = true;
      EXPECT_NEAR(w.lhs, 0.5, 1e-12);
      EXPECT_NEAR(w.rhs, 0.0, 1e-12);
    }
  }
  EXPECT_TRUE(found);
  // The same witness shows up as superadditivity of f.
  const auto f = coalition_table(env.dp, env.prior);
  EXPECT_GT(f[3], f[1] + f[2]);
}

TEST(MNatural, PairGuessAndMonopolyHold) {
  const Environment pg = pair_guess(0.7);
  const ConditionReport r = check_mnat_concave(pg.dp, pg.prior);
  EXPECT_TRUE(r.holds);
  EXPECT_GE(r.margin, 0.0);
  const Environment ht = hypothesis_testing();
  EXPECT_TRUE(check_mnat_concave(ht.dp, ht.prior).holds);
}

TEST(MNatural, TooManySenders) {
  std::vector<double> f(1, 0.0);
  EXPECT_THROW(check_mnat_concave(f, 21), SubsetSpaceTooLarge);
}

TEST(MNatural, AgreesWithDirectDefinitionOnRandomSetFunctions) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3;
    std::vector<double> f(8);
    f[0] = 0.0;
    for (int b = 1; b < 8; ++b) f[b] = std::round(unit(gen) * 4.0);
    bool expected = true;
    for (int s = 0; s < 8; ++s) {
      for (int t = 0; t < 8; ++t) {
        for (int e = 0; e < n; ++e) {
          const int eb = 1 << e;
          if (!(s & eb) || (t & eb)) continue;
          double best = f[s ^ eb] + f[t | eb];
          for (int g = 0; g < n; ++g) {
            const int gb = 1 << g;
            if (!(t & gb) || (s & gb)) continue;
            best = std::max(best, f[(s ^ eb) | gb] + f[(t | eb) ^ gb]);
          }
          if (f[s] + f[t] > best + 1e-10) expected = false;
        }
      }
    }
    EXPECT_EQ(check_mnat_concave(f, n).holds, expected) << "trial " << trial;
  }
}

TEST(Separable, IndependentComponentsHaveZeroMargin) {
  // Independent components with additively separable utility.
  for (double q : {0.55, 0.7, 0.9}) {
    const Environment env = pair_guess(q);
    const ConditionReport su = check_substitutes(env.dp, env.prior, 30, 1);
    EXPECT_TRUE(su.holds);
    EXPECT_EQ(su.margin, 0.0);
    EXPECT_TRUE(check_mnat_concave(env.dp, env.prior).holds);
  }
}

TEST(Substitutes, ExactLayerMatchesOracle) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    oracle::RandomEnvOptions opt;
    opt.num_senders = 2;
    const Environment env = oracle::random_environment(gen, opt);
    const auto raw = oracle::raw(env);
    bool expected = true;
    // Beliefs mu'(w_S) for S in {empty, {j}}, sender i not in S.
    for (int i = 1; i <= 2; ++i) {
      const int j = 3 - i;
      std::vector<std::vector<double>> beliefs{raw.mass};
      for (int v = 0; v < raw.sizes[j]; ++v) {
        std::vector<double> piece = raw.mass;
        double z = 0.0;
        for (std::size_t s = 0; s < piece.size(); ++s) {
          if (oracle::digits(raw, s)[j] != v) piece[s] = 0.0;
          z += piece[s];
        }
        if (z > 0.0) beliefs.push_back(piece);
      }
      for (const auto& mu : beliefs) {
        if (oracle::vbar(raw, mu, i) < oracle::expected_vbar(raw, mu, i) - 1e-10) expected = false;
      }
    }
    EXPECT_EQ(check_substitutes(env.dp, env.prior).holds, expected) << "trial " << trial;
  }
}
