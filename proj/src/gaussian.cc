#include "attn/gaussian.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "attn/errors.h"
#include "attn/rng.h"

namespace attn {
namespace {

void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

std::string label(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    out[k] = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1);
  }
  return out;
}

// -Var(w_0 | w_i) and friends for the correlated block.
double single_value(double p0, double pi, double pc, double a) {
  const double a2 = a * a;
  const double b2 = (1.0 - a) * (1.0 - a);
  const double num = a2 * pi + b2 * pc;
  return -num / (p0 * num + (a2 + b2) * pi * pc);
}

void compositions(int remaining_units, int slots, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    current.push_back(remaining_units);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int k = 1; k <= remaining_units - (slots - 1); ++k) {
    current.push_back(k);
    compositions(remaining_units - k, slots - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

void GaussianScenario::validate() const {
  check_positive(p0, "p0");
  check_positive(c, "c");
  for (double pi : p) check_positive(pi, "sender precision");
}

double GaussianScenario::total_precision() const {
  double total = p0;
  for (double pi : p) total += pi;
  return total;
}

GaussianRates gaussian_rates(const GaussianScenario& s) {
  s.validate();
  const double P = s.total_precision();
  GaussianRates out;
  for (double pi : s.p) {
    const double vbar = pi / (P * (P - pi));
    out.residual_value.push_back(vbar);
    out.rate.push_back(s.c * P * (P - pi) / pi);
    out.visits.push_back(vbar / s.c);
    if (out.rate.back() > 1.0) out.discrete_feasible = false;
  }
  return out;
}

double gaussian_receiver_payoff(const GaussianScenario& s) {
  s.validate();
  const double P = s.total_precision();
  double sum = 1.0;
  for (double pi : s.p) sum += pi / (P - pi);
  return -sum / P;
}

SymmetryReport symmetry_gap(double p0, double q, int n, double c, double step) {
  check_positive(p0, "p0");
  check_positive(q, "total sender precision");
  check_positive(c, "c");
  check_positive(step, "grid step");
  if (n < 1) throw InvalidArgument("need at least one sender");
  const double ratio = q / step;
  const int units = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - units) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("grid step must divide the total precision");
  }
  if (units < n) throw InvalidArgument("grid step too coarse for the number of senders");

  SymmetryReport report;
  report.symmetric_allocation.assign(n, q / n);
  report.symmetric_payoff = gaussian_receiver_payoff({p0, report.symmetric_allocation, c});

  std::vector<std::vector<int>> parts;
  std::vector<int> current;
  compositions(units, n, current, parts);
  report.best.payoff = -std::numeric_limits<double>::infinity();
  for (const auto& part : parts) {
    AllocationPoint point;
    for (int k : part) point.p.push_back(k * step);
    point.payoff = gaussian_receiver_payoff({p0, point.p, c});
    if (point.payoff > report.best.payoff) report.best = point;
    report.grid.push_back(std::move(point));
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(report.symmetric_payoff));
  report.symmetric_is_max = report.best.payoff <= report.symmetric_payoff + tol;
  return report;
}

void CorrelatedScenario::validate() const {
  check_positive(p0, "p0");
  check_positive(p1, "p1");
  check_positive(p2, "p2");
  check_positive(pc, "pc");
  check_positive(c, "c");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
}

CorrelatedValues correlated_values(const CorrelatedScenario& cs) {
  cs.validate();
  const double a = cs.alpha;
  CorrelatedValues v;
  v.u0 = -1.0 / cs.p0;
  v.u1 = single_value(cs.p0, cs.p1, cs.pc, a);
  v.u2 = single_value(cs.p0, cs.p2, cs.pc, a);
  v.u12 = single_value(cs.p0, cs.p1 + cs.p2, cs.pc, a);
  v.vbar1 = v.u12 - v.u2;
  v.vbar2 = v.u12 - v.u1;
  v.payoff = v.u12 - v.vbar1 - v.vbar2;
  return v;
}

double payoff_at_alpha(const CorrelatedScenario& cs, double alpha) {
  CorrelatedScenario at = cs;
  at.alpha = alpha;
  return correlated_values(at).payoff;
}

double correlation_threshold(double p0, double p1, double p2) {
  check_positive(p0, "p0");
  check_positive(p1, "p1");
  check_positive(p2, "p2");
  const double k = 2.0 * p0 + p1 + p2;
  return p1 * p2 * k / ((p0 + p1) * (p0 + p1) + p2 * k);
}

BinaryActionRate binary_action_rate(double p, double c) {
  check_positive(p, "p");
  check_positive(c, "c");
  BinaryActionRate out;
  out.residual_value = std::sqrt(2.0 / (std::numbers::pi * p));
  out.rate = c / out.residual_value;
  return out;
}

double bridge_variance(double p, double c, double t) {
  check_positive(p, "p");
  check_positive(c, "c");
  const double horizon = 1.0 / (p * c);
  if (!(t >= 0.0 && t <= horizon * (1.0 + 1e-12))) {
    throw InvalidArgument("time outside [0, T*]");
  }
  return std::max(0.0, 1.0 / p - c * t);
}

BridgeSchedule bridge_schedule(double p, double c, int points) {
  check_positive(p, "p");
  check_positive(c, "c");
  if (points < 2) throw InvalidArgument("schedule needs at least two points");
  BridgeSchedule s;
  s.horizon = 1.0 / (p * c);
  s.t = linspace(0.0, s.horizon, points);
  s.t.back() = s.horizon;
  for (double t : s.t) s.variance.push_back(bridge_variance(p, c, t));
  return s;
}

BridgeCheck bridge_mc_check(double p, double c, std::size_t paths, std::uint64_t seed, int steps,
                            int points, double tolerance_se) {
  check_positive(p, "p");
  check_positive(c, "c");
  if (paths < 2) throw InvalidArgument("need at least two paths");
  if (points < 2 || steps < 1 || steps % (points - 1) != 0) {
    throw InvalidArgument("grid points must divide the step count");
  }
  const double horizon = 1.0 / (p * c);
  const double dt = horizon / steps;
  const double sd_dt = std::sqrt(dt);
  const int stride = steps / (points - 1);

  // Posterior mean of w_1 given X_t is k(t) X_t.
  std::vector<double> gain(points);
  for (int g = 0; g < points; ++g) {
    const double t = g * stride * dt;
    const double s = t / horizon;
    const double noise = c * t * (horizon - t) / horizon;
    gain[g] = g == 0 ? 0.0 : (g == points - 1 ? 1.0 : s / (p * noise + s * s));
  }

  std::vector<double> sum(points, 0.0), sum_sq(points, 0.0);
  std::vector<double> w(steps + 1);
  const double sqrt_c = std::sqrt(c);
  for (std::size_t path = 0; path < paths; ++path) {
    Rng rng(derive_seed(seed, path));
    const double omega = rng.normal() / std::sqrt(p);
    w[0] = 0.0;
    for (int k = 1; k <= steps; ++k) w[k] = w[k - 1] + sd_dt * rng.normal();
    for (int g = 0; g < points; ++g) {
      const int k = g * stride;
      const double s = static_cast<double>(k) / steps;
      const double x = s * omega + sqrt_c * (w[k] - s * w[steps]);
      const double err = omega - gain[g] * x;
      sum[g] += err * err;
      sum_sq[g] += err * err * err * err;
    }
  }

  BridgeCheck out;
  out.paths = paths;
  out.steps = steps;
  out.seed = seed;
  out.pass = true;
  const double r = static_cast<double>(paths);
  for (int g = 0; g < points; ++g) {
    BridgeCheckRow row;
    row.t = g == points - 1 ? horizon : g * stride * dt;
    row.analytic = bridge_variance(p, c, row.t);
    row.empirical = sum[g] / r;
    const double var = std::max(0.0, (sum_sq[g] - r * row.empirical * row.empirical) / (r - 1.0));
    row.se = std::sqrt(var / r);
    row.within = std::abs(row.empirical - row.analytic) <= tolerance_se * row.se + 1e-12;
    out.pass = out.pass && row.within;
    out.rows.push_back(row);
  }
  return out;
}

LargeNCurve large_n_gaussian(double p0, double p, double c, int n_min, int n_max) {
  check_positive(p0, "p0");
  check_positive(p, "p");
  check_positive(c, "c");
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("need 1 <= n_min <= n_max");
  LargeNCurve curve;
  curve.payoff_tends_to_zero = true;
  for (int n = n_min; n <= n_max; ++n) {
    LargeNRow row;
    row.n = n;
    const double full = p0 + n * p;
    row.mse_term = -1.0 / full;
    row.attention_cost = n * p / ((p0 + (n - 1) * p) * full);
    row.visits = row.attention_cost / c;
    row.payoff = row.mse_term - row.attention_cost;
    if (!curve.rows.empty() && !(std::abs(row.payoff) < std::abs(curve.rows.back().payoff))) {
      curve.payoff_tends_to_zero = false;
    }
    curve.rows.push_back(row);
  }
  curve.scaled_cost_last = n_max * curve.rows.back().attention_cost;
  return curve;
}

Environment gaussian_grid_environment(const GaussianScenario& s,
                                      const GaussianGridOptions& options) {
  s.validate();
  if (options.points < 2 || options.actions < 2) throw InvalidArgument("grid too small");
  check_positive(options.span, "grid span");
  const int n = static_cast<int>(s.p.size());
  if (n < 1) throw InvalidArgument("grid environment needs at least one sender");

  const double sd0 = 1.0 / std::sqrt(s.p0);
  const std::vector<double> w0 = linspace(-options.span * sd0, options.span * sd0, options.points);
  std::vector<ComponentSpace> components{{"w0", {}}};
  for (double x : w0) components[0].values.push_back(label(x));

  std::vector<double> marginal(w0.size());
  for (std::size_t k = 0; k < w0.size(); ++k) marginal[k] = std::exp(-0.5 * s.p0 * w0[k] * w0[k]);

  std::vector<std::vector<std::vector<double>>> conditionals;
  for (int i = 0; i < n; ++i) {
    const double sd = std::sqrt(1.0 / s.p0 + 1.0 / s.p[i]);
    const std::vector<double> grid = linspace(-options.span * sd, options.span * sd, options.points);
    ComponentSpace comp{"w" + std::to_string(i + 1), {}};
    for (double x : grid) comp.values.push_back(label(x));
    components.push_back(std::move(comp));
    std::vector<std::vector<double>> rows;
    for (double x0 : w0) {
      std::vector<double> row;
      double total = 0.0;
      for (double x : grid) {
        row.push_back(std::exp(-0.5 * s.p[i] * (x - x0) * (x - x0)));
        total += row.back();
      }
      for (double& v : row) v /= total;
      rows.push_back(std::move(row));
    }
    conditionals.push_back(std::move(rows));
  }
  double total = 0.0;
  for (double m : marginal) total += m;
  for (double& m : marginal) m /= total;

  auto space = std::make_shared<const JointSpace>(std::move(components));
  JointPrior prior = JointPrior::from_product(space, marginal, conditionals);

  const std::vector<double> acts = linspace(w0.front(), w0.back(), options.actions);
  std::vector<std::string> names;
  std::vector<std::vector<double>> utility;
  for (double a : acts) {
    names.push_back(label(a));
    std::vector<double> row;
    for (double x0 : w0) row.push_back(-(a - x0) * (a - x0));
    utility.push_back(std::move(row));
  }
  DecisionProblem dp = DecisionProblem::over_payoff_state(space, std::move(names), std::move(utility));
  return {"gaussian-grid", std::move(prior), std::move(dp)};
}

}  // namespace attn
