#include "attn/largemarket.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "attn/errors.h"
#include "attn/rng.h"

namespace attn {
namespace {

constexpr double kRowTolerance = 1e-9;

// Visits every count vector of `total` draws over `alphabet` letters.
void for_each_count(int total, int alphabet, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> counts(alphabet, 0);
  std::function<void(int, int)> rec = [&](int letter, int remaining) {
    if (letter == alphabet - 1) {
      counts[letter] = remaining;
      fn(counts);
      return;
    }
    for (int m = remaining; m >= 0; --m) {
      counts[letter] = m;
      rec(letter + 1, remaining - m);
    }
  };
  rec(0, total);
}

struct Model {
  int states = 0;
  int signals = 0;
  int actions = 0;
  std::vector<double> log_prior;
  std::vector<std::vector<double>> log_f;  // [state][signal]
  const IIDEnvironment* env = nullptr;

  explicit Model(const IIDEnvironment& e) : env(&e) {
    e.validate();
    states = static_cast<int>(e.states.size());
    signals = static_cast<int>(e.signals.size());
    actions = static_cast<int>(e.actions.size());
    for (int j = 0; j < states; ++j) {
      log_prior.push_back(e.prior[j] > 0.0 ? std::log(e.prior[j])
                                           : -std::numeric_limits<double>::infinity());
      std::vector<double> row;
      for (double f : e.likelihood[j]) row.push_back(std::log(f));
      log_f.push_back(std::move(row));
    }
  }

  // max_a sum_j g_j u(a, j)
  double stopping(const std::vector<double>& g) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      double s = 0.0;
      for (int j = 0; j < states; ++j) s += g[j] * env->utility[a][j];
      best = std::max(best, s);
    }
    return best;
  }

  // v-bar of one more signal at (possibly unnormalised) mass g.
  double residual(const std::vector<double>& g) const {
    std::vector<double> next(states);
    double total = 0.0;
    for (int s = 0; s < signals; ++s) {
      for (int j = 0; j < states; ++j) next[j] = g[j] * env->likelihood[j][s];
      total += stopping(next);
    }
    return std::max(0.0, total - stopping(g));
  }

  double error(const std::vector<double>& g) const {
    double full = 0.0;
    for (int j = 0; j < states; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < actions; ++a) best = std::max(best, env->utility[a][j]);
      full += g[j] * best;
    }
    return std::max(0.0, full - stopping(g));
  }

  // Mass vector for the counts; returns the log scale factored out.
  double mass(const std::vector<int>& counts, double log_coef, std::vector<double>& g) const {
    g.assign(states, 0.0);
    double top = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < states; ++j) {
      double lw = log_prior[j] + log_coef;
      for (int s = 0; s < signals; ++s) {
        if (counts[s] > 0) lw += counts[s] * log_f[j][s];
      }
      g[j] = lw;
      top = std::max(top, lw);
    }
    for (int j = 0; j < states; ++j) g[j] = std::exp(g[j] - top);
    return top;
  }
};

using CellValue = double (Model::*)(const std::vector<double>&) const;

double exact_value(const Model& model, int draws, CellValue value) {
  double sum = 0.0;
  std::vector<double> g;
  const double log_total = std::lgamma(draws + 1.0);
  for_each_count(draws, model.signals, [&](const std::vector<int>& counts) {
    double log_coef = log_total;
    for (int m : counts) log_coef -= std::lgamma(m + 1.0);
    const double scale = model.mass(counts, log_coef, g);
    const double v = (model.*value)(g);
    if (v > 0.0) sum += std::exp(scale) * v;
  });
  return sum;
}

void sampled_value(const Model& model, int draws, CellValue value, const CurveOptions& options,
                   std::uint64_t stream, double& mean, double& se) {
  if (options.samples_per_state < 2) throw InvalidArgument("need at least two samples per state");
  mean = 0.0;
  double var_sum = 0.0;
  std::vector<int> counts(model.signals);
  std::vector<double> g;
  const double r = static_cast<double>(options.samples_per_state);
  for (int j = 0; j < model.states; ++j) {
    const double pj = model.env->prior[j];
    if (pj <= 0.0) continue;
    Rng rng(derive_seed(stream, static_cast<std::uint64_t>(j)));
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < options.samples_per_state; ++k) {
      std::fill(counts.begin(), counts.end(), 0);
      for (int d = 0; d < draws; ++d) ++counts[rng.categorical(model.env->likelihood[j])];
      model.mass(counts, 0.0, g);
      double total = 0.0;
      for (double x : g) total += x;
      for (double& x : g) x /= total;
      const double v = (model.*value)(g);
      s1 += v;
      s2 += v * v;
    }
    const double m = s1 / r;
    const double var = std::max(0.0, (s2 - r * m * m) / (r - 1.0));
    mean += pj * m;
    var_sum += pj * pj * var / r;
  }
  se = std::sqrt(var_sum);
}

std::vector<CurvePoint> curve(const IIDEnvironment& env, int n_min, int n_max,
                              const CurveOptions& options, bool residual) {
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("need 1 <= n_min <= n_max");
  const Model model(env);
  const CellValue value = residual ? &Model::residual : &Model::error;
  std::vector<CurvePoint> out;
  for (int n = n_min; n <= n_max; ++n) {
    const int draws = residual ? n - 1 : n;
    CurvePoint point;
    point.n = n;
    const bool over = multiset_count(draws, model.signals) > options.enumeration_cap;
    if (options.force_sampling || over) {
      if (!options.force_sampling && !options.allow_sampling) {
        throw BudgetExceeded("n = " + std::to_string(n) + " needs more than " +
                             std::to_string(options.enumeration_cap) +
                             " count vectors; enable sampling");
      }
      point.exact = false;
      sampled_value(model, draws, value, options,
                    derive_seed(options.seed, static_cast<std::uint64_t>(n) * 2 + (residual ? 1 : 0)),
                    point.value, point.se);
    } else {
      point.value = exact_value(model, draws, value);
    }
    point.scaled = n * point.value;
    out.push_back(point);
  }
  return out;
}

}  // namespace

void IIDEnvironment::validate() const {
  const std::size_t m = states.size();
  if (m < 2) throw InvalidArgument("need at least two payoff states");
  if (prior.size() != m) throw InvalidArgument("prior length differs from the number of states");
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("prior weights must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > kRowTolerance) throw InvalidArgument("prior must sum to 1");
  if (signals.empty()) throw InvalidArgument("signal alphabet is empty");
  if (likelihood.size() != m) throw InvalidArgument("likelihood needs one row per state");
  for (std::size_t j = 0; j < m; ++j) {
    if (likelihood[j].size() != signals.size()) {
      throw InvalidArgument("likelihood row for state " + states[j] + " has the wrong length");
    }
    double row = 0.0;
    for (double f : likelihood[j]) {
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw InvalidArgument("likelihood for state " + states[j] + " must be strictly positive");
      }
      row += f;
    }
    if (std::abs(row - 1.0) > kRowTolerance) {
      throw InvalidArgument("likelihood row for state " + states[j] + " must sum to 1");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      bool differ = false;
      for (std::size_t s = 0; s < signals.size(); ++s) {
        if (std::abs(likelihood[j][s] - likelihood[k][s]) > 1e-12) differ = true;
      }
      if (!differ) {
        throw InvalidArgument("states " + states[j] + " and " + states[k] + " are indistinguishable");
      }
    }
  }
  if (actions.empty() || utility.size() != actions.size()) {
    throw InvalidArgument("utility needs one row per action");
  }
  std::set<std::size_t> owners;
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t best = 0;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (utility[a].size() != m) throw InvalidArgument("utility row has the wrong length");
      if (utility[a][j] > utility[best][j]) best = a;
    }
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (a != best && !(utility[a][j] < utility[best][j])) {
        throw InvalidArgument("state " + states[j] + " has no strictly best action");
      }
    }
    if (!owners.insert(best).second) {
      throw InvalidArgument("two states share the same best action");
    }
  }
}

Environment IIDEnvironment::to_environment(int n) const {
  validate();
  if (n < 1) throw InvalidArgument("need at least one sender");
  std::vector<ComponentSpace> components{{"state", states}};
  for (int i = 1; i <= n; ++i) components.push_back({"signal" + std::to_string(i), signals});
  auto space = std::make_shared<const JointSpace>(std::move(components));
  JointPrior joint = JointPrior::from_product(
      space, prior, std::vector<std::vector<std::vector<double>>>(n, likelihood));
  DecisionProblem dp = DecisionProblem::over_payoff_state(space, actions, utility);
  return {"iid-" + std::to_string(n), std::move(joint), std::move(dp)};
}

IIDEnvironment default_abstention(double accuracy, double abstain) {
  IIDEnvironment env = match_the_state(accuracy);
  env.actions.push_back("abstain");
  env.utility.push_back({abstain, abstain});
  env.validate();
  return env;
}

IIDEnvironment match_the_state(double accuracy) {
  IIDEnvironment env;
  env.states = {"0", "1"};
  env.prior = {0.5, 0.5};
  env.signals = {"0", "1"};
  env.likelihood = {{accuracy, 1.0 - accuracy}, {1.0 - accuracy, accuracy}};
  env.actions = {"guess-0", "guess-1"};
  env.utility = {{1.0, 0.0}, {0.0, 1.0}};
  env.validate();
  return env;
}

std::size_t multiset_count(int n, int alphabet) {
  if (n < 0 || alphabet < 1) throw InvalidArgument("multiset_count needs n >= 0, alphabet >= 1");
  // C(n + L - 1, L - 1), built up one factor at a time.
  const int k = alphabet - 1;
  unsigned __int128 value = 1;
  const unsigned __int128 limit = std::numeric_limits<std::size_t>::max();
  for (int t = 1; t <= k; ++t) {
    value = value * static_cast<unsigned>(n + t) / static_cast<unsigned>(t);
    if (value > limit) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(value);
}

std::vector<CurvePoint> residual_value_curve(const IIDEnvironment& env, int n_min, int n_max,
                                             const CurveOptions& options) {
  return curve(env, n_min, n_max, options, true);
}

std::vector<CurvePoint> decision_error_curve(const IIDEnvironment& env, int n_min, int n_max,
                                             const CurveOptions& options) {
  return curve(env, n_min, n_max, options, false);
}

ExponentialFit fit_exponential_rate(std::span<const int> n, std::span<const double> y) {
  if (n.size() != y.size()) throw InvalidArgument("curve columns differ in length");
  std::size_t positive = 0;
  for (double v : y) positive += v > 0.0 ? 1 : 0;
  if (positive < 4) throw DegenerateCurve("need at least four strictly positive entries");
  ExponentialFit fit;
  fit.first = y.size() / 2;
  fit.count = y.size() - fit.first;
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = fit.first; k < y.size(); ++k) {
    if (!(y[k] > 0.0)) {
      throw DegenerateCurve("entry at n = " + std::to_string(n[k]) + " is not strictly positive");
    }
    sx += n[k];
    sy += std::log(y[k]);
  }
  const double cnt = static_cast<double>(fit.count);
  const double mx = sx / cnt, my = sy / cnt;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = fit.first; k < y.size(); ++k) {
    const double dx = n[k] - mx, dy = std::log(y[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw DegenerateCurve("tail has a single distinct n");
  const double slope = sxy / sxx;
  fit.rho = std::exp(slope);
  fit.kappa = std::exp(my - slope * mx);
  fit.r2 = syy <= 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.log_residual_sd = std::sqrt(std::max(0.0, syy - slope * sxy) / cnt);
  fit.decaying = fit.rho < 1.0 - 1e-12;
  return fit;
}

ExponentialFit fit_exponential_rate(const std::vector<CurvePoint>& curve) {
  std::vector<int> n;
  std::vector<double> y;
  for (const auto& p : curve) {
    n.push_back(p.n);
    y.push_back(p.value);
  }
  return fit_exponential_rate(n, y);
}

}  // namespace attn
