#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "attn/equilibrium.h"
#include "attn/errors.h"
#include "attn/gaussian.h"

using namespace attn;

namespace {

// Posterior variance of w_0 ~ N(0, 1/p0) given y = 1 w_0 + e, e ~ N(0, noise).
double posterior_variance(double p0, const Eigen::MatrixXd& noise) {
  const Eigen::Index m = noise.rows();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  const Eigen::MatrixXd cov = ones * ones.transpose() / p0 + noise;
  const Eigen::VectorXd cross = ones / p0;
  return 1.0 / p0 - cross.dot(cov.ldlt().solve(cross));
}

// w_i = w_0 + ((1-a) e_i + a e_c) / scale, observed jointly for the listed senders.
double correlated_oracle(double p0, double p1, double p2, double pc, double a,
                         std::vector<int> observed, double scale) {
  const double prec[] = {p1, p2};
  Eigen::MatrixXd noise(observed.size(), observed.size());
  for (std::size_t r = 0; r < observed.size(); ++r) {
    for (std::size_t s = 0; s < observed.size(); ++s) {
      double v = a * a / pc;
      if (observed[r] == observed[s]) v += (1 - a) * (1 - a) / prec[observed[r]];
      noise(r, s) = v / (scale * scale);
    }
  }
  return posterior_variance(p0, noise);
}

// Independent-signal oracle: -Var(w_0 | w_S) for the sender subset S.
double independent_value(double p0, const std::vector<double>& p) {
  if (p.empty()) return -1.0 / p0;
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) noise(i, i) = 1.0 / p[i];
  return -posterior_variance(p0, noise);
}

}  // namespace

TEST(GaussianRates, Examples) {
  const GaussianRates r = gaussian_rates({1.0, {1.0, 1.0}, 0.01});
  ASSERT_EQ(r.rate.size(), 2u);
  EXPECT_NEAR(r.rate[0], 0.06, 1e-15);
  EXPECT_NEAR(r.rate[1], 0.06, 1e-15);
  EXPECT_TRUE(r.discrete_feasible);

  const GaussianRates m = gaussian_rates({1.0, {2.0}, 0.01});
  EXPECT_NEAR(m.rate[0], 0.015, 1e-15);
  EXPECT_NEAR(m.residual_value[0], 1.0 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(1.0 / m.rate[0], m.residual_value[0] / 0.01, 1e-9);

  const GaussianRates tiny = gaussian_rates({1.0, {1e-9, 1.0}, 0.01});
  EXPECT_GT(tiny.rate[0], 1e6);
  EXPECT_LT(tiny.visits[0], 1e-6);
  EXPECT_FALSE(tiny.discrete_feasible);
}

TEST(GaussianRates, ResidualValuesMatchLinearGaussianOracle) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> prec(0.1, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + rep % 4;
    GaussianScenario s{prec(gen), {}, 0.01};
    for (int i = 0; i < n; ++i) s.p.push_back(prec(gen));
    const GaussianRates r = gaussian_rates(s);
    for (int i = 0; i < n; ++i) {
      std::vector<double> others = s.p;
      others.erase(others.begin() + i);
      const double vbar = independent_value(s.p0, s.p) - independent_value(s.p0, others);
      EXPECT_NEAR(r.residual_value[i], vbar, 1e-12);
      EXPECT_NEAR(r.rate[i], s.c / vbar, 1e-9 * r.rate[i]);
    }
  }
}

TEST(GaussianPayoff, Examples) {
  EXPECT_NEAR(gaussian_receiver_payoff({1.0, {1.0, 1.0}, 0.01}), -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(gaussian_receiver_payoff({1.0, {1.5, 0.5}, 0.01}), -(1.0 + 1.0 + 0.2) / 3.0, 1e-15);
  EXPECT_NEAR(gaussian_receiver_payoff({2.0, {}, 0.01}), -0.5, 1e-15);
}

TEST(GaussianPayoff, IdentityWithAttentionCost) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> prec(0.05, 10.0);
  std::uniform_real_distribution<double> cost(1e-4, 0.5);
  for (int rep = 0; rep < 200; ++rep) {
    GaussianScenario s{prec(gen), {}, cost(gen)};
    for (int i = 0; i < 1 + rep % 5; ++i) s.p.push_back(prec(gen));
    const GaussianRates r = gaussian_rates(s);
    double attention = 0.0;
    for (double lam : r.rate) attention += s.c / lam;
    EXPECT_NEAR(gaussian_receiver_payoff(s), -1.0 / s.total_precision() - attention, 1e-12);
  }
}

TEST(GaussianPayoff, Validation) {
  EXPECT_THROW(gaussian_rates({0.0, {1.0}, 0.01}), InvalidArgument);
  EXPECT_THROW(gaussian_rates({1.0, {-1.0}, 0.01}), InvalidArgument);
  EXPECT_THROW(gaussian_rates({1.0, {1.0}, 0.0}), InvalidArgument);
}

TEST(Symmetry, TwoSenders) {
  const SymmetryReport r = symmetry_gap(1.0, 2.0, 2, 0.01, 0.05);
  EXPECT_TRUE(r.symmetric_is_max);
  EXPECT_NEAR(r.symmetric_payoff, -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.best.p[0], 1.0, 1e-12);
  EXPECT_NEAR(r.best.p[1], 1.0, 1e-12);
  EXPECT_EQ(r.grid.size(), 39u);
  for (const auto& point : r.grid) {
    if (std::abs(point.p[0] - 1.5) < 1e-9) {
      EXPECT_NEAR(point.payoff, -2.2 / 3.0, 1e-12);
      EXPECT_LT(point.payoff, r.symmetric_payoff);
    }
  }
}

TEST(Symmetry, OneAndThreeSenders) {
  const SymmetryReport one = symmetry_gap(1.0, 2.0, 1, 0.01, 0.5);
  ASSERT_EQ(one.grid.size(), 1u);
  EXPECT_DOUBLE_EQ(one.grid[0].p[0], 2.0);
  EXPECT_TRUE(one.symmetric_is_max);

  const SymmetryReport three = symmetry_gap(0.5, 3.0, 3, 0.01, 0.1);
  EXPECT_TRUE(three.symmetric_is_max);
  for (double pi : three.best.p) EXPECT_NEAR(pi, 1.0, 1e-9);
  EXPECT_THROW(symmetry_gap(1.0, 2.0, 2, 0.01, 0.3), InvalidArgument);
}

TEST(Correlation, Threshold) {
  EXPECT_NEAR(correlation_threshold(1.0, 1.0, 1.0), 0.5, 1e-15);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> prec(0.2, 4.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double p0 = prec(gen), p1 = prec(gen), p2 = prec(gen);
    const double pbar = correlation_threshold(p0, p1, p2);
    CorrelatedScenario cs{p0, p1, p2, pbar, 0.0, 0.01};
    EXPECT_NEAR(payoff_at_alpha(cs, 1.0), payoff_at_alpha(cs, 0.0), 1e-12);
  }
}

TEST(Correlation, OrderingFlipsAcrossThreshold) {
  CorrelatedScenario high{1.0, 1.0, 1.0, 0.6, 0.0, 0.01};
  EXPECT_GT(payoff_at_alpha(high, 1.0), payoff_at_alpha(high, 0.0));
  CorrelatedScenario low{1.0, 1.0, 1.0, 0.4, 0.0, 0.01};
  EXPECT_LT(payoff_at_alpha(low, 1.0), payoff_at_alpha(low, 0.0));
  EXPECT_NEAR(payoff_at_alpha(high, 0.0), -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(payoff_at_alpha(high, 1.0), -1.0 / 1.6, 1e-15);
}

TEST(Correlation, MonotoneWhenCommonSignalDominates) {
  const CorrelatedScenario cs{1.0, 0.7, 1.1, 2.5, 0.0, 0.01};
  double previous = payoff_at_alpha(cs, 0.0);
  for (int k = 1; k <= 100; ++k) {
    const double current = payoff_at_alpha(cs, k / 100.0);
    EXPECT_GT(current, previous) << "alpha " << k / 100.0;
    previous = current;
  }
}

TEST(Correlation, VariancesMatchLinearGaussianOracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> prec(0.2, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    CorrelatedScenario cs{prec(gen), prec(gen), prec(gen), prec(gen), unit(gen), 0.01};
    const CorrelatedValues v = correlated_values(cs);
    const double a = cs.alpha;
    const double k = std::sqrt((1 - a) * (1 - a) + a * a);
    EXPECT_NEAR(v.u0, -1.0 / cs.p0, 1e-15);
    EXPECT_NEAR(v.u1, -correlated_oracle(cs.p0, cs.p1, cs.p2, cs.pc, a, {0}, k), 1e-12);
    EXPECT_NEAR(v.u2, -correlated_oracle(cs.p0, cs.p1, cs.p2, cs.pc, a, {1}, k), 1e-12);
    EXPECT_NEAR(v.u12, -correlated_oracle(cs.p0, cs.p1, cs.p2, cs.pc, a, {0, 1}, k), 1e-12);
    EXPECT_GE(v.vbar1, -1e-15);
    EXPECT_GE(v.vbar2, -1e-15);
  }
}

TEST(Correlation, LiteralMixtureAgreesAtEndpoints) {
  for (double a : {0.0, 1.0}) {
    const CorrelatedScenario cs{1.3, 0.8, 2.1, 0.9, a, 0.01};
    const CorrelatedValues v = correlated_values(cs);
    // Rescaling w_i by the normaliser leaves the information unchanged.
    EXPECT_NEAR(v.u12, -correlated_oracle(cs.p0, cs.p1, cs.p2, cs.pc, a, {0, 1}, 1.0), 1e-12);
  }
}

TEST(BinaryAction, Examples) {
  const BinaryActionRate r = binary_action_rate(1.0, 0.1);
  EXPECT_NEAR(r.residual_value, 0.79788456080286536, 1e-14);
  EXPECT_NEAR(r.rate, 0.12533141373155002, 1e-14);
  EXPECT_NEAR(binary_action_rate(4.0, 0.1).residual_value, r.residual_value / 2.0, 1e-15);
  EXPECT_LT(binary_action_rate(1.0, 1e-12).rate, 1e-11);
}

TEST(BinaryAction, MatchesQuadrature) {
  for (double p : {0.25, 1.0, 4.0, 9.0}) {
    const double sd = 1.0 / std::sqrt(p);
    auto integrand = [&](double x) {
      return std::abs(x) * std::exp(-0.5 * x * x / (sd * sd)) / (sd * std::sqrt(2 * std::numbers::pi));
    };
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        15, 1e-13);
    EXPECT_NEAR(binary_action_rate(p, 0.1).residual_value, q, 1e-9) << "p " << p;
  }
}

TEST(Bridge, Schedule) {
  const BridgeSchedule s = bridge_schedule(1.0, 0.1);
  EXPECT_DOUBLE_EQ(s.horizon, 10.0);
  ASSERT_EQ(s.t.size(), 11u);
  EXPECT_DOUBLE_EQ(s.t[5], 5.0);
  EXPECT_NEAR(s.variance[5], 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(s.variance.front(), 1.0);
  EXPECT_DOUBLE_EQ(s.t.back(), 10.0);
  EXPECT_DOUBLE_EQ(s.variance.back(), 0.0);
  EXPECT_THROW(bridge_variance(1.0, 0.1, 10.5), InvalidArgument);
}

TEST(Bridge, MonteCarloMatchesSchedule) {
  const BridgeCheck check = bridge_mc_check(1.0, 0.1, 10000, 42);
  ASSERT_EQ(check.rows.size(), 11u);
  for (const auto& row : check.rows) {
    EXPECT_TRUE(row.within) << "t " << row.t << " analytic " << row.analytic << " empirical "
                            << row.empirical << " se " << row.se;
  }
  EXPECT_TRUE(check.pass);
  EXPECT_DOUBLE_EQ(check.rows.back().empirical, 0.0);
  // A wrong sign reading (MSE = ct - 1/p) would be negative mid-horizon.
  EXPECT_GT(check.rows[5].empirical, 0.4);
}

TEST(Bridge, Deterministic) {
  const BridgeCheck a = bridge_mc_check(2.0, 0.05, 200, 9, 100, 11);
  const BridgeCheck b = bridge_mc_check(2.0, 0.05, 200, 9, 100, 11);
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].empirical, b.rows[k].empirical);
  EXPECT_THROW(bridge_mc_check(1.0, 0.1, 100, 1, 1000, 7), InvalidArgument);
}

TEST(LargeN, UnitPrecisions) {
  const LargeNCurve curve = large_n_gaussian(1.0, 1.0, 0.01, 1, 500);
  for (const auto& row : curve.rows) {
    EXPECT_NEAR(row.attention_cost, 1.0 / (row.n + 1), 1e-12);
    EXPECT_NEAR(row.mse_term, -1.0 / (row.n + 1), 1e-15);
  }
  EXPECT_NEAR(curve.rows[8].attention_cost, 0.1, 1e-15);
  EXPECT_TRUE(curve.payoff_tends_to_zero);
  EXPECT_LT(std::abs(curve.rows.back().payoff), 0.005);
  EXPECT_NEAR(curve.scaled_cost_last, 1.0, 0.01);
}

TEST(LargeN, MatchesRatesAndMonopoly) {
  const double p0 = 0.7, p = 1.9, c = 0.02;
  const LargeNCurve curve = large_n_gaussian(p0, p, c, 1, 30);
  EXPECT_NEAR(curve.rows[0].visits, p / (c * p0 * (p0 + p)), 1e-9);
  for (const auto& row : curve.rows) {
    const GaussianScenario s{p0, std::vector<double>(row.n, p), c};
    const GaussianRates r = gaussian_rates(s);
    double visits = 0.0;
    for (double v : r.visits) visits += v;
    EXPECT_NEAR(row.visits, visits, 1e-9 * visits);
    EXPECT_NEAR(row.payoff, gaussian_receiver_payoff(s), 1e-12);
  }
}

TEST(GridEnvironment, ReproducesClosedFormRates) {
  const GaussianScenario s{1.0, {1.0, 1.0}, 0.01};
  const Environment env = gaussian_grid_environment(s, {41, 4.0, 161});
  EXPECT_EQ(env.prior.space().num_states(), 41u * 41u * 41u);
  const EquilibriumProfile profile = aon_rates(env.dp, env.prior, s.c);
  const GaussianRates closed = gaussian_rates(s);
  for (int i = 1; i <= 2; ++i) {
    const double rate = profile.rate(StateGraph::root(), i);
    EXPECT_NEAR(rate, closed.rate[i - 1], 0.02 * closed.rate[i - 1]) << "sender " << i;
  }
  EXPECT_NEAR(profile.receiver_payoff(), gaussian_receiver_payoff(s),
              0.02 * std::abs(gaussian_receiver_payoff(s)));
}

TEST(GridEnvironment, Validation) {
  EXPECT_THROW(gaussian_grid_environment({1.0, {}, 0.01}), InvalidArgument);
  EXPECT_THROW(gaussian_grid_environment({1.0, {1.0}, 0.01}, {1, 4.0, 10}), InvalidArgument);
}
