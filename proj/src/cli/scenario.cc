#include "attn/cli/scenario.h"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace attn::cli {
namespace {

constexpr double kRowTolerance = 1e-9;

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& message) const {
    const int line = node.IsDefined() ? node.Mark().line + 1 : 0;
    throw ScenarioError(source_, line, field, message);
  }

  YAML::Node required(const YAML::Node& parent, const std::string& key,
                      const std::string& field) const {
    const YAML::Node child = parent[key];
    if (!child.IsDefined() || child.IsNull()) fail(parent, field, "missing required field");
    return child;
  }

  void only_keys(const YAML::Node& node, const std::string& field,
                 std::initializer_list<const char*> allowed) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!keys.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown field");
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot convert '" + node.Scalar() + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& field) const {
    const double v = scalar<double>(node, field);
    if (!std::isfinite(v)) fail(node, field, "must be finite");
    return v;
  }

  double positive(const YAML::Node& node, const std::string& field) const {
    const double v = number(node, field);
    if (!(v > 0.0)) fail(node, field, "must be positive");
    return v;
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
      out.push_back(number(node[k], field + "[" + std::to_string(k) + "]"));
    }
    return out;
  }

  std::vector<std::string> labels(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, field, "expected a non-empty list");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t k = 0; k < node.size(); ++k) {
      out.push_back(scalar<std::string>(node[k], field + "[" + std::to_string(k) + "]"));
      if (!seen.insert(out.back()).second) fail(node[k], field, "duplicate label '" + out.back() + "'");
    }
    return out;
  }

  void probability_row(const YAML::Node& node, const std::string& field,
                       const std::vector<double>& row) const {
    double total = 0.0;
    for (double p : row) {
      if (p < 0.0) fail(node, field, "negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kRowTolerance) {
      std::ostringstream msg;
      msg << "row sums to " << total << ", expected 1";
      fail(node, field, msg.str());
    }
  }

  ComponentSpace component(const YAML::Node& node, const std::string& field) const {
    only_keys(node, field, {"name", "values"});
    ComponentSpace c;
    c.name = scalar<std::string>(required(node, "name", field + ".name"), field + ".name");
    c.values = labels(required(node, "values", field + ".values"), field + ".values");
    return c;
  }

  Environment environment(const YAML::Node& root, const std::string& name) const {
    const YAML::Node comps = required(root, "components", "components");
    only_keys(comps, "components", {"payoff", "senders"});
    std::vector<ComponentSpace> components{component(required(comps, "payoff", "components.payoff"),
                                                     "components.payoff")};
    const YAML::Node senders = required(comps, "senders", "components.senders");
    if (!senders.IsSequence() || senders.size() == 0) {
      fail(senders, "components.senders", "expected a non-empty list");
    }
    std::set<std::string> names{components[0].name};
    for (std::size_t k = 0; k < senders.size(); ++k) {
      const std::string field = "components.senders[" + std::to_string(k) + "]";
      components.push_back(component(senders[k], field));
      if (!names.insert(components.back().name).second) {
        fail(senders[k], field + ".name", "duplicate component name");
      }
    }
    const int n = static_cast<int>(components.size()) - 1;
    auto space = std::make_shared<const JointSpace>(components);

    const YAML::Node prior_node = required(root, "prior", "prior");
    only_keys(prior_node, "prior", {"joint", "marginal", "conditionals"});
    std::optional<JointPrior> prior;
    if (prior_node["joint"].IsDefined()) {
      if (prior_node["marginal"].IsDefined() || prior_node["conditionals"].IsDefined()) {
        fail(prior_node, "prior", "give either joint or marginal + conditionals, not both");
      }
      const YAML::Node joint = prior_node["joint"];
      const auto mass = numbers(joint, "prior.joint");
      if (mass.size() != space->num_states()) {
        fail(joint, "prior.joint",
             "expected " + std::to_string(space->num_states()) + " entries in row-major order");
      }
      probability_row(joint, "prior.joint", mass);
      prior.emplace(space, mass);
    } else {
      const YAML::Node marginal_node = required(prior_node, "marginal", "prior.marginal");
      const auto marginal = numbers(marginal_node, "prior.marginal");
      if (marginal.size() != components[0].values.size()) {
        fail(marginal_node, "prior.marginal", "expected one entry per payoff value");
      }
      probability_row(marginal_node, "prior.marginal", marginal);
      const YAML::Node conds = required(prior_node, "conditionals", "prior.conditionals");
      if (!conds.IsMap()) fail(conds, "prior.conditionals", "expected a mapping keyed by sender");
      std::vector<std::vector<std::vector<double>>> rows(n);
      for (const auto& kv : conds) {
        const std::string sender = kv.first.as<std::string>();
        int index = -1;
        for (int i = 1; i <= n; ++i) {
          if (components[i].name == sender) index = i;
        }
        if (index < 0) fail(kv.first, "prior.conditionals." + sender, "unknown sender");
        const YAML::Node table = kv.second;
        const std::string field = "prior.conditionals." + sender;
        if (!table.IsMap()) fail(table, field, "expected rows keyed by payoff value");
        rows[index - 1].assign(components[0].values.size(), {});
        std::vector<bool> seen(components[0].values.size(), false);
        for (const auto& row_kv : table) {
          const std::string w0 = row_kv.first.as<std::string>();
          const std::string row_field = field + "." + w0;
          const auto& values = components[0].values;
          const auto it = std::find(values.begin(), values.end(), w0);
          if (it == values.end()) fail(row_kv.first, row_field, "unknown payoff value");
          const auto row = numbers(row_kv.second, row_field);
          if (row.size() != components[index].values.size()) {
            fail(row_kv.second, row_field,
                 "expected " + std::to_string(components[index].values.size()) + " entries");
          }
          probability_row(row_kv.second, row_field, row);
          rows[index - 1][it - values.begin()] = row;
          seen[it - values.begin()] = true;
        }
        for (std::size_t w = 0; w < seen.size(); ++w) {
          if (!seen[w]) fail(table, field + "." + components[0].values[w], "missing row");
        }
      }
      for (int i = 1; i <= n; ++i) {
        if (rows[i - 1].empty()) fail(conds, "prior.conditionals." + components[i].name, "missing sender");
      }
      prior.emplace(JointPrior::from_product(space, marginal, rows));
    }

    const YAML::Node decision = required(root, "decision", "decision");
    only_keys(decision, "decision", {"actions", "utility"});
    const auto actions = labels(required(decision, "actions", "decision.actions"), "decision.actions");
    const YAML::Node utility_node = required(decision, "utility", "decision.utility");
    if (!utility_node.IsMap()) fail(utility_node, "decision.utility", "expected rows keyed by action");
    std::vector<std::vector<double>> utility(actions.size());
    std::optional<bool> broadcast;
    for (const auto& kv : utility_node) {
      const std::string action = kv.first.as<std::string>();
      const std::string field = "decision.utility." + action;
      const auto it = std::find(actions.begin(), actions.end(), action);
      if (it == actions.end()) fail(kv.first, field, "unknown action");
      auto row = numbers(kv.second, field);
      const bool over_payoff = row.size() == components[0].values.size();
      if (!over_payoff && row.size() != space->num_states()) {
        fail(kv.second, field,
             "expected " + std::to_string(components[0].values.size()) +
                 " entries (one per payoff value) or " + std::to_string(space->num_states()) +
                 " (one per joint state)");
      }
      if (broadcast && *broadcast != over_payoff) {
        fail(kv.second, field, "all utility rows must use the same layout");
      }
      broadcast = over_payoff;
      utility[it - actions.begin()] = std::move(row);
    }
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (utility[a].empty()) fail(utility_node, "decision.utility." + actions[a], "missing row");
    }
    DecisionProblem dp = *broadcast
                             ? DecisionProblem::over_payoff_state(space, actions, std::move(utility))
                             : DecisionProblem(space, actions, std::move(utility));
    return {name, std::move(*prior), std::move(dp)};
  }

  GaussianBlock gaussian(const YAML::Node& node) const {
    only_keys(node, "gaussian", {"p0", "p", "pc", "alpha"});
    GaussianBlock g;
    g.p0 = positive(required(node, "p0", "gaussian.p0"), "gaussian.p0");
    const YAML::Node p = required(node, "p", "gaussian.p");
    g.p = numbers(p, "gaussian.p");
    for (double v : g.p) {
      if (!(v > 0.0)) fail(p, "gaussian.p", "precisions must be positive");
    }
    if (node["pc"].IsDefined()) g.pc = positive(node["pc"], "gaussian.pc");
    if (node["alpha"].IsDefined()) {
      g.alpha = number(node["alpha"], "gaussian.alpha");
      if (g.alpha < 0.0 || g.alpha > 1.0) fail(node["alpha"], "gaussian.alpha", "must lie in [0, 1]");
    }
    return g;
  }

  SimulationBlock simulation(const YAML::Node& node) const {
    only_keys(node, "simulation", {"replications", "seed", "receiver_order", "round_cap"});
    SimulationBlock s;
    if (node["replications"].IsDefined()) {
      s.replications = scalar<std::size_t>(node["replications"], "simulation.replications");
      if (s.replications == 0) fail(node["replications"], "simulation.replications", "must be positive");
    }
    if (node["seed"].IsDefined()) s.seed = scalar<std::uint64_t>(node["seed"], "simulation.seed");
    if (node["receiver_order"].IsDefined()) {
      s.receiver_order = scalar<std::string>(node["receiver_order"], "simulation.receiver_order");
    }
    if (node["round_cap"].IsDefined()) {
      s.round_cap = scalar<std::size_t>(node["round_cap"], "simulation.round_cap");
      if (s.round_cap == 0) fail(node["round_cap"], "simulation.round_cap", "must be positive");
    }
    return s;
  }

  Scenario parse(const std::string& text) const {
    YAML::Node root;
    try {
      root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
      throw ScenarioError(source_, e.mark.line + 1, "", e.msg);
    }
    if (!root.IsMap()) throw ScenarioError(source_, 0, "", "scenario must be a mapping");
    only_keys(root, "", {"schema_version", "name", "description", "cost", "components", "prior",
                         "decision", "gaussian", "simulation"});
    const YAML::Node version = required(root, "schema_version", "schema_version");
    if (scalar<int>(version, "schema_version") != kSchemaVersion) {
      fail(version, "schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    Scenario s;
    s.source = source_;
    s.name = scalar<std::string>(required(root, "name", "name"), "name");
    if (root["description"].IsDefined()) s.description = scalar<std::string>(root["description"], "description");
    s.cost = positive(required(root, "cost", "cost"), "cost");

    const bool finite = root["components"].IsDefined() || root["prior"].IsDefined() ||
                        root["decision"].IsDefined();
    const bool gauss = root["gaussian"].IsDefined();
    if (finite == gauss) {
      fail(root, "", "exactly one of a finite environment (components, prior, decision) or a gaussian block is required");
    }
    try {
      if (finite) s.environment = environment(root, s.name);
      if (gauss) s.gaussian = gaussian(root["gaussian"]);
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      throw ScenarioError(source_, 0, "", e.what());
    }
    if (root["simulation"].IsDefined()) s.simulation = simulation(root["simulation"]);
    return s;
  }

 private:
  std::string source_;
};

}  // namespace

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& field,
                             const std::string& message)
    : InvalidArgument(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                      (field.empty() ? std::string() : field + ": ") + message) {}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  return Parser(source).parse(text);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, 0, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace attn::cli
