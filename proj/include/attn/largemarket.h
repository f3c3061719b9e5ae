#ifndef ATTN_LARGEMARKET_H_
#define ATTN_LARGEMARKET_H_

// Large markets of conditionally iid senders: each sender's component is an
// independent draw from f(. | w_0). Expectations over the other senders'
// components depend only on signal counts, so exact computations enumerate
// count vectors with multinomial weights.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attn/decision.h"

namespace attn {

struct IIDEnvironment {
  std::vector<std::string> states;
  std::vector<double> prior;
  std::vector<std::string> signals;
  std::vector<std::vector<double>> likelihood;  // [state][signal], all > 0
  std::vector<std::string> actions;
  std::vector<std::vector<double>> utility;  // [action][state]

  // Throws InvalidArgument on non-positive likelihoods, indistinguishable
  // states, or a state without its own strictly best action.
  void validate() const;
  // Finite environment with n senders, for cross-checks at small n.
  Environment to_environment(int n) const;
};

// Binary state, symmetric binary signals, actions guess-0 / guess-1 / abstain.
IIDEnvironment default_abstention(double accuracy = 0.6, double abstain = 0.55);
// Same without the abstain action.
IIDEnvironment match_the_state(double accuracy = 0.6);

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

struct CurveOptions {
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  // Beyond the cap: sample (stratified by w_0) instead of throwing BudgetExceeded.
  bool allow_sampling = false;
  bool force_sampling = false;
  std::size_t samples_per_state = 20000;
  std::uint64_t seed = 1;
};

struct CurvePoint {
  int n = 0;
  double value = 0.0;
  double scaled = 0.0;  // n * value
  double se = 0.0;      // zero when exact
  bool exact = true;
};

// Number of count vectors of n draws over an alphabet; saturates at SIZE_MAX.
std::size_t multiset_count(int n, int alphabet);

// E[v-bar(w_n | w_1..w_{n-1})] per n.
std::vector<CurvePoint> residual_value_curve(const IIDEnvironment& env, int n_min, int n_max,
                                             const CurveOptions& options = {});
// E[U-bar] - E[U(posterior after n signals)] per n.
std::vector<CurvePoint> decision_error_curve(const IIDEnvironment& env, int n_min, int n_max,
                                             const CurveOptions& options = {});

struct ExponentialFit {
  double kappa = 0.0;
  double rho = 0.0;
  double r2 = 0.0;
  double log_residual_sd = 0.0;  // RMS residual of log y about the fitted line
  std::size_t first = 0;  // index of the first point used
  std::size_t count = 0;
  bool decaying = false;  // rho < 1
};

// Least squares of log y on n over the tail half of the points:
// y ~ kappa * rho^n. Needs at least four strictly positive entries overall and
// throws DegenerateCurve if any entry in the tail is zero or negative.
ExponentialFit fit_exponential_rate(std::span<const int> n, std::span<const double> y);
ExponentialFit fit_exponential_rate(const std::vector<CurvePoint>& curve);

}  // namespace attn

#endif  // ATTN_LARGEMARKET_H_
