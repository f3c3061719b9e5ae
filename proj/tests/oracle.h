#ifndef ATTN_TESTS_ORACLE_H_
#define ATTN_TESTS_ORACLE_H_

// Brute-force reference computations. Nothing here calls into the library's
// algorithms: environments are copied out into plain tables and every
// quantity is recomputed by looping over joint states, messages and actions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "attn/decision.h"
#include "attn/environment.h"

namespace oracle {

struct Raw {
  std::vector<int> sizes;  // per component, component 0 first
  std::vector<double> mass;
  std::vector<std::vector<double>> u;  // u[a][state]
};

inline Raw raw(const attn::Environment& env) {
  Raw r;
  const auto& space = env.prior.space();
  for (int k = 0; k < space.num_components(); ++k) r.sizes.push_back(space.num_values(k));
  r.mass.assign(env.prior.mass().begin(), env.prior.mass().end());
  r.u.resize(env.dp.num_actions());
  for (int a = 0; a < env.dp.num_actions(); ++a) {
    for (std::size_t s = 0; s < space.num_states(); ++s) r.u[a].push_back(env.dp.utility(a, s));
  }
  return r;
}

inline std::size_t num_states(const Raw& r) {
  std::size_t n = 1;
  for (int k : r.sizes) n *= static_cast<std::size_t>(k);
  return n;
}

inline std::vector<int> digits(const Raw& r, std::size_t state) {
  std::vector<int> d(r.sizes.size());
  for (int k = static_cast<int>(r.sizes.size()) - 1; k >= 0; --k) {
    d[k] = static_cast<int>(state % r.sizes[k]);
    state /= r.sizes[k];
  }
  return d;
}

// max_a sum_w mu(w) u(a, w), mu possibly unnormalised.
inline double best(const Raw& r, const std::vector<double>& mu) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& row : r.u) {
    double total = 0.0;
    for (std::size_t s = 0; s < mu.size(); ++s) total += mu[s] * row[s];
    top = std::max(top, total);
  }
  return top;
}

inline double total(const std::vector<double>& mu) {
  double t = 0.0;
  for (double m : mu) t += m;
  return t;
}

inline double stopping(const Raw& r, const std::vector<double>& mu) {
  return best(r, mu) / total(mu);
}

inline double full_info(const Raw& r, const std::vector<double>& mu) {
  double t = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& row : r.u) top = std::max(top, row[s]);
    t += mu[s] * top;
  }
  return t / total(mu);
}

// Unnormalised pieces of mu keyed by the realisation of the components in
// `which` (component indices).
inline std::map<std::vector<int>, std::vector<double>> split(const Raw& r,
                                                             const std::vector<double>& mu,
                                                             const std::vector<int>& which) {
  std::map<std::vector<int>, std::vector<double>> out;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    const auto d = digits(r, s);
    std::vector<int> key;
    for (int k : which) key.push_back(d[k]);
    auto& piece = out[key];
    if (piece.empty()) piece.assign(mu.size(), 0.0);
    piece[s] = mu[s];
  }
  return out;
}

// E_{w_which}[U(mu | w_which)], skipping zero-mass realisations.
inline double expected_stopping(const Raw& r, const std::vector<double>& mu,
                                const std::vector<int>& which) {
  const double z = total(mu);
  double t = 0.0;
  for (const auto& [key, piece] : split(r, mu, which)) {
    const double m = total(piece);
    if (m > 0.0) t += m / z * stopping(r, piece);
  }
  return t;
}

inline double vbar(const Raw& r, const std::vector<double>& mu, int sender) {
  return expected_stopping(r, mu, {sender}) - stopping(r, mu);
}

inline std::vector<int> others(const Raw& r, int sender) {
  std::vector<int> out;
  for (int k = 1; k < static_cast<int>(r.sizes.size()); ++k) {
    if (k != sender) out.push_back(k);
  }
  return out;
}

// E_{w_{-i} ~ mu}[ v-bar(w_i | mu conditioned on w_{-i}) ].
inline double expected_vbar(const Raw& r, const std::vector<double>& mu, int sender) {
  const double z = total(mu);
  double t = 0.0;
  for (const auto& [key, piece] : split(r, mu, others(r, sender))) {
    const double m = total(piece);
    if (m > 0.0) t += m / z * vbar(r, piece, sender);
  }
  return t;
}

inline std::vector<double> condition(const Raw& r, const std::vector<double>& mu,
                                     const std::map<int, int>& assignment) {
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t s = 0; s < mu.size(); ++s) {
    const auto d = digits(r, s);
    bool keep = true;
    for (const auto& [k, v] : assignment) keep = keep && d[k] == v;
    if (keep) out[s] = mu[s];
  }
  const double z = total(out);
  for (double& m : out) m /= z;
  return out;
}

// f(S) with S given as component indices.
inline double coalition(const Raw& r, const std::vector<int>& subset) {
  if (subset.empty()) return 0.0;
  return expected_stopping(r, r.mass, subset) - stopping(r, r.mass);
}

// Posterior after a kernel[value][message] experiment on one component.
inline std::vector<double> posterior(const Raw& r, const std::vector<double>& mu, int sender,
                                     const std::vector<std::vector<double>>& kernel,
                                     int message) {
  std::vector<double> out(mu.size());
  for (std::size_t s = 0; s < mu.size(); ++s) out[s] = mu[s] * kernel[digits(r, s)[sender]][message];
  const double z = total(out);
  for (double& m : out) m /= z;
  return out;
}

// Small random environment: 1..max_values per component, random prior with
// some zero states, random utilities over the full joint state.
struct RandomEnvOptions {
  int num_senders = 2;
  int max_values = 3;
  int max_actions = 3;
  double zero_probability = 0.1;
  bool payoff_state_only = false;
};

inline attn::Environment random_environment(std::mt19937_64& gen, const RandomEnvOptions& opt) {
  std::uniform_int_distribution<int> values(1, opt.max_values);
  std::uniform_int_distribution<int> action_count(1, opt.max_actions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<attn::ComponentSpace> comps;
  for (int k = 0; k <= opt.num_senders; ++k) {
    attn::ComponentSpace c{"c" + std::to_string(k), {}};
    const int nv = k == 0 ? values(gen) : std::max(2, values(gen));
    for (int v = 0; v < nv; ++v) c.values.push_back("v" + std::to_string(v));
    comps.push_back(c);
  }
  auto space = std::make_shared<const attn::JointSpace>(comps);
  std::vector<double> mass(space->num_states());
  double z = 0.0;
  for (double& m : mass) {
    m = unit(gen) < opt.zero_probability ? 0.0 : unit(gen) + 0.05;
    z += m;
  }
  if (z == 0.0) {
    mass[0] = 1.0;
    z = 1.0;
  }
  for (double& m : mass) m /= z;
  const int na = action_count(gen);
  std::vector<std::string> actions;
  for (int a = 0; a < na; ++a) actions.push_back("a" + std::to_string(a));
  const std::size_t cols =
      opt.payoff_state_only ? static_cast<std::size_t>(space->num_values(0)) : space->num_states();
  std::vector<std::vector<double>> u(na, std::vector<double>(cols));
  for (auto& row : u) {
    for (double& x : row) x = std::round(unit(gen) * 8.0) / 4.0 - 1.0;
  }
  attn::JointPrior prior(space, std::move(mass));
  if (opt.payoff_state_only) {
    return {"random", std::move(prior),
            attn::DecisionProblem::over_payoff_state(space, actions, std::move(u))};
  }
  return {"random", std::move(prior), attn::DecisionProblem(space, actions, std::move(u))};
}

}  // namespace oracle

#endif  // ATTN_TESTS_ORACLE_H_
