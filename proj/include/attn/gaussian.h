#ifndef ATTN_GAUSSIAN_H_
#define ATTN_GAUSSIAN_H_

// Gaussian-quadratic closed forms: w_0 ~ N(0, 1/p0), w_i ~ N(w_0, 1/p_i)
// conditionally independent, u(a, w) = -(a - w_0)^2, so U(mu) = -Var(w_0 | mu).

#include <cstdint>
#include <vector>

#include "attn/decision.h"

namespace attn {

struct GaussianScenario {
  double p0 = 1.0;
  std::vector<double> p;
  double c = 0.01;

  void validate() const;
  double total_precision() const;  // P = p0 + sum p_i
};

struct GaussianRates {
  std::vector<double> rate;            // lambda*_i = c P (P - p_i) / p_i
  std::vector<double> residual_value;  // p_i / (P (P - p_i))
  std::vector<double> visits;          // 1 / lambda*_i
  // Every rate is a valid per-round probability. When false the rates are
  // still reported, read as continuous-time Poisson intensities.
  bool discrete_feasible = true;
};

GaussianRates gaussian_rates(const GaussianScenario& s);

// -(1/P) (1 + sum p_i / (P - p_i)); independent of c.
double gaussian_receiver_payoff(const GaussianScenario& s);

struct AllocationPoint {
  std::vector<double> p;
  double payoff = 0.0;
};

struct SymmetryReport {
  std::vector<double> symmetric_allocation;
  double symmetric_payoff = 0.0;
  AllocationPoint best;
  bool symmetric_is_max = false;
  std::vector<AllocationPoint> grid;  // allocations with every p_i a positive multiple of step
};

// Searches allocations of total sender precision q over n senders.
SymmetryReport symmetry_gap(double p0, double q, int n, double c, double step);

struct CorrelatedScenario {
  double p0 = 1.0;
  double p1 = 1.0;
  double p2 = 1.0;
  double pc = 1.0;
  double alpha = 0.0;
  double c = 0.01;

  void validate() const;
};

struct CorrelatedValues {
  double u0 = 0.0;   // U(mu^0)
  double u1 = 0.0;   // U(mu'(w_1))
  double u2 = 0.0;   // U(mu'(w_2))
  double u12 = 0.0;  // U(mu'(w_1, w_2))
  double vbar1 = 0.0;
  double vbar2 = 0.0;
  double payoff = 0.0;  // u12 - vbar1 - vbar2
};

// The three conditional variances of the correlated-signal block, evaluated
// at cs.alpha.
CorrelatedValues correlated_values(const CorrelatedScenario& cs);
double payoff_at_alpha(const CorrelatedScenario& cs, double alpha);
// p-bar: at p_c = p-bar the payoffs at alpha = 0 and alpha = 1 coincide.
double correlation_threshold(double p0, double p1, double p2);

struct BinaryActionRate {
  double residual_value = 0.0;  // E|w_1| = sqrt(2 / (pi p))
  double rate = 0.0;            // c / residual_value
};

BinaryActionRate binary_action_rate(double p, double c);

struct BridgeSchedule {
  double horizon = 0.0;  // T* = 1/(pc), also the monopoly's expected attention
  std::vector<double> t;
  std::vector<double> variance;  // 1/p - c t
};

double bridge_variance(double p, double c, double t);
BridgeSchedule bridge_schedule(double p, double c, int points = 11);

struct BridgeCheckRow {
  double t = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;  // mean squared error of the posterior mean
  double se = 0.0;
  bool within = false;
};

struct BridgeCheck {
  std::size_t paths = 0;
  int steps = 0;
  std::uint64_t seed = 0;
  std::vector<BridgeCheckRow> rows;
  bool pass = false;
};

// Paths use derive_seed(seed, path); grid points must divide the step count.
BridgeCheck bridge_mc_check(double p, double c, std::size_t paths, std::uint64_t seed,
                            int steps = 1000, int points = 11, double tolerance_se = 3.0);

struct LargeNRow {
  int n = 0;
  double mse_term = 0.0;        // -1/(p0 + n p)
  double attention_cost = 0.0;  // n p / ((p0 + (n-1) p)(p0 + n p))
  double visits = 0.0;          // attention_cost / c
  double payoff = 0.0;          // mse_term - attention_cost
};

struct LargeNCurve {
  std::vector<LargeNRow> rows;
  bool payoff_tends_to_zero = false;  // |payoff| strictly decreasing across the range
  double scaled_cost_last = 0.0;      // n * attention_cost at the last n; -> 1 as n grows
};

LargeNCurve large_n_gaussian(double p0, double p, double c, int n_min, int n_max);

struct GaussianGridOptions {
  int points = 41;     // grid size per component
  double span = 4.0;   // half-width in standard deviations
  int actions = 161;
};

// Truncated discretisation of a Gaussian scenario as a finite environment.
Environment gaussian_grid_environment(const GaussianScenario& s,
                                      const GaussianGridOptions& options = {});

}  // namespace attn

#endif  // ATTN_GAUSSIAN_H_
