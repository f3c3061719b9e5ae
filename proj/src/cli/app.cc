#include "attn/cli/app.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "attn/cli/output.h"
#include "attn/cli/scenario.h"
#include "attn/conditions.h"
#include "attn/equilibrium.h"
#include "attn/errors.h"
#include "attn/gaussian.h"
#include "attn/largemarket.h"
#include "attn/simulate.h"

namespace attn::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  bool force = false;
  std::optional<std::string> receiver_order;
  std::optional<std::size_t> round_cap;
  std::size_t su_samples = 32;

  std::string sweep_kind;
  std::optional<double> grid_step;
  std::optional<double> p0;
  std::vector<double> p;
  std::optional<double> pc;
  std::optional<double> cost;
  std::optional<double> q;
  int senders = 2;
  int n_min = 1;
  std::optional<int> n_max;
  double accuracy = 0.6;
  double abstain = 0.55;
  int steps = 1000;
};

class Command {
 public:
  Command(std::string name, const Options& opt, std::ostream& out)
      : name_(std::move(name)), opt_(opt), out_(out), start_(std::chrono::steady_clock::now()) {
    report_["command"] = name_;
  }

  fs::path out_dir() {
    if (!dir_) {
      std::string dir = opt_.out;
      if (dir.empty()) {
        const char* env = std::getenv(kOutDirVariable);
        dir = env && *env ? env : kDefaultOutDir;
      }
      dir_ = fs::path(dir);
      std::error_code ec;
      fs::create_directories(*dir_, ec);
      if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
    }
    return *dir_;
  }

  CsvWriter csv(const std::string& file, const std::vector<std::string>& header) {
    const fs::path path = out_dir() / file;
    files_.push_back(path.string());
    return CsvWriter(path.string(), header);
  }

  Json& report() { return report_; }
  std::ostream& out() { return out_; }
  const Options& opt() const { return opt_; }

  int finish(int code) {
    report_["outputs"] = files_;
    report_["exit_code"] = code;
    report_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path path = out_dir() / "report.json";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << report_.dump(2) << '\n';
    if (!f) throw Error("cannot write " + path.string());
    out_ << "wrote " << files_.size() << " CSV file(s) and " << path.string() << '\n';
    return code;
  }

 private:
  std::string name_;
  const Options& opt_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::optional<fs::path> dir_;
  std::vector<std::string> files_;
  Json report_;
};

Json to_json(const ConditionReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["holds"] = r.holds;
  j["margin"] = r.margin;
  j["checked"] = r.checked;
  j["violations"] = r.violations;
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back({{"context", x.context}, {"lhs", x.lhs}, {"rhs", x.rhs}});
  j["witnesses"] = w;
  Json layers = Json::array();
  for (const auto& l : r.layers) {
    layers.push_back({{"name", l.name}, {"holds", l.holds}, {"margin", l.margin},
                      {"checked", l.checked}, {"violations", l.violations}});
  }
  j["layers"] = layers;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// Human-readable tables only; CSV files keep full precision.
std::string brief(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::string sender_name(const JointSpace& space, int i) { return space.component(i).name; }

const Environment& finite_env(const Scenario& s, const char* command) {
  if (!s.environment) {
    throw InvalidArgument(std::string(command) + " needs a finite environment scenario");
  }
  return *s.environment;
}

void print_conditions(std::ostream& out, const std::vector<ConditionReport>& reports) {
  out << std::left << std::setw(16) << "condition" << std::setw(7) << "holds" << std::setw(24)
      << "margin" << std::setw(10) << "checked"
      << "violations\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(16) << r.condition << std::setw(7) << (r.holds ? "yes" : "NO")
        << std::setw(24) << brief(r.margin) << std::setw(10) << r.checked << r.violations
        << '\n';
    for (std::size_t k = 0; k < std::min<std::size_t>(3, r.witnesses.size()); ++k) {
      const auto& w = r.witnesses[k];
      out << "  witness " << w.context << ": " << brief(w.lhs) << " vs "
          << brief(w.rhs) << '\n';
    }
    if (!r.note.empty()) out << "  note: " << r.note << '\n';
  }
}

// --- check -----------------------------------------------------------------

int cmd_check(Command& cmd, const Scenario& s) {
  cmd.report()["scenario"] = s.name;
  std::vector<ConditionReport> reports;
  if (s.gaussian) {
    const GaussianRates r = gaussian_rates({s.gaussian->p0, s.gaussian->p, s.cost});
    ConditionReport feasible;
    feasible.condition = "discrete-rates";
    feasible.holds = r.discrete_feasible;
    feasible.checked = r.rate.size();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rate.size(); ++i) {
      margin = std::min(margin, 1.0 - r.rate[i]);
      if (r.rate[i] > 1.0) {
        ++feasible.violations;
        feasible.witnesses.push_back({"sender " + std::to_string(i + 1), r.rate[i], 1.0});
      }
    }
    feasible.margin = r.rate.empty() ? 0.0 : margin;
    feasible.note = "gaussian scenario: rates above 1 are read as continuous-time intensities";
    reports.push_back(feasible);
  } else {
    const Environment& env = *s.environment;
    const StateGraph graph(env.dp, env.prior);
    reports.push_back(check_visit_worth(graph, s.cost));
    reports.push_back(check_substitutes(graph, env.dp, cmd.opt().su_samples,
                                        cmd.opt().seed.value_or(s.simulation.seed)));
    reports.push_back(check_mnat_concave(env.dp, env.prior));
  }
  print_conditions(cmd.out(), reports);

  auto table = cmd.csv("conditions.csv", {"condition", "holds", "margin", "checked", "violations"});
  auto witnesses = cmd.csv("witnesses.csv", {"condition", "context", "lhs", "rhs"});
  Json conditions = Json::array();
  bool all = true;
  for (const auto& r : reports) {
    table.row({r.condition, r.holds, r.margin, r.checked, r.violations});
    for (const auto& w : r.witnesses) witnesses.row({r.condition, w.context, w.lhs, w.rhs});
    conditions.push_back(to_json(r));
    if (!r.holds && !s.gaussian) all = false;
  }
  table.close();
  witnesses.close();
  cmd.report()["conditions"] = conditions;
  return cmd.finish(all ? kExitOk : kExitConditionFailure);
}

// --- solve -----------------------------------------------------------------

int solve_gaussian(Command& cmd, const Scenario& s) {
  const GaussianBlock& g = *s.gaussian;
  const GaussianScenario gs{g.p0, g.p, s.cost};
  const GaussianRates r = gaussian_rates(gs);
  const double payoff = gaussian_receiver_payoff(gs);
  auto rates = cmd.csv("gaussian_rates.csv", {"sender", "precision", "rate", "residual_value", "visits"});
  cmd.out() << "sender  precision  rate  visits\n";
  for (std::size_t i = 0; i < r.rate.size(); ++i) {
    rates.row({static_cast<int>(i + 1), g.p[i], r.rate[i], r.residual_value[i], r.visits[i]});
    cmd.out() << i + 1 << "  " << brief(g.p[i]) << "  " << brief(r.rate[i]) << "  "
              << brief(r.visits[i]) << '\n';
  }
  rates.close();
  auto summary = cmd.csv("gaussian_summary.csv", {"quantity", "value"});
  summary.row({"total_precision", gs.total_precision()});
  summary.row({"receiver_payoff", payoff});
  summary.row({"discrete_feasible", r.discrete_feasible ? 1.0 : 0.0});
  cmd.out() << "receiver payoff " << brief(payoff) << '\n';
  if (!r.discrete_feasible) {
    cmd.out() << "warning: some rates exceed 1; read them as continuous-time intensities\n";
  }
  Json j{{"receiver_payoff", payoff}, {"rates", r.rate}, {"discrete_feasible", r.discrete_feasible}};
  if (g.pc) {
    if (g.p.size() != 2) throw InvalidArgument("the correlated block needs exactly two senders");
    const CorrelatedScenario cs{g.p0, g.p[0], g.p[1], *g.pc, g.alpha, s.cost};
    const double pbar = correlation_threshold(g.p0, g.p[0], g.p[1]);
    const double at0 = payoff_at_alpha(cs, 0.0);
    const double at1 = payoff_at_alpha(cs, 1.0);
    const double at = payoff_at_alpha(cs, g.alpha);
    summary.row({"correlation_threshold", pbar});
    summary.row({"payoff_alpha_0", at0});
    summary.row({"payoff_alpha_1", at1});
    summary.row({"payoff_at_alpha", at});
    cmd.out() << "p-bar " << brief(pbar) << ", payoff at alpha=0 " << brief(at0)
              << ", at alpha=1 " << brief(at1) << '\n';
    j["correlation_threshold"] = pbar;
    j["payoff_alpha_0"] = at0;
    j["payoff_alpha_1"] = at1;
  }
  summary.close();
  cmd.report()["gaussian"] = j;
  return cmd.finish(kExitOk);
}

int cmd_solve(Command& cmd, const Scenario& s) {
  cmd.report()["scenario"] = s.name;
  if (s.gaussian) return solve_gaussian(cmd, s);
  const Environment& env = *s.environment;
  ProfileOptions popt;
  popt.force = cmd.opt().force;
  popt.substitutes_samples = cmd.opt().su_samples;
  popt.seed = cmd.opt().seed.value_or(s.simulation.seed);
  const EquilibriumProfile profile = aon_rates(env.dp, env.prior, s.cost, popt);
  const StateGraph& graph = profile.graph();
  const JointSpace& space = env.prior.space();
  const int n = profile.num_senders();

  auto table = cmd.csv("profile.csv", {"state", "sender", "rate"});
  for (std::size_t id = 0; id < graph.size(); ++id) {
    for (int i = 1; i <= n; ++i) {
      if (graph.node(id).revealed.contains(i)) continue;
      table.row({graph.describe(id), sender_name(space, i), profile.rate(id, i)});
    }
  }
  table.close();
  const auto payoffs = profile.sender_payoffs();
  auto pay = cmd.csv("payoffs.csv", {"party", "payoff"});
  cmd.out() << "party  payoff  root rate\n";
  for (int i = 1; i <= n; ++i) {
    pay.row({sender_name(space, i), payoffs[i - 1]});
    cmd.out() << sender_name(space, i) << "  " << brief(payoffs[i - 1]) << "  "
              << brief(profile.rate(StateGraph::root(), i)) << '\n';
  }
  pay.row({"receiver", profile.receiver_payoff()});
  pay.close();
  cmd.out() << "receiver  " << brief(profile.receiver_payoff()) << '\n';
  const auto prices = marginal_prices(env.dp, env.prior);
  auto price = cmd.csv("prices.csv", {"sender", "price"});
  for (int i = 1; i <= n; ++i) price.row({sender_name(space, i), prices[i - 1]});
  price.close();
  if (!profile.is_equilibrium()) {
    cmd.out() << "warning: conditions fail; rates were forced and need not form an equilibrium\n";
  }
  cmd.report()["profile"] = {{"sender_payoffs", payoffs},
                             {"receiver_payoff", profile.receiver_payoff()},
                             {"is_equilibrium", profile.is_equilibrium()},
                             {"rates_in_unit_interval", profile.rates_in_unit_interval()},
                             {"nodes", graph.size()}};
  cmd.report()["conditions"] = Json::array({to_json(profile.visit_worth()), to_json(profile.substitutes())});
  return cmd.finish(kExitOk);
}

// --- simulate --------------------------------------------------------------

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  double mean(double r) const { return sum / r; }
  double se(double r) const {
    if (r < 2) return 0.0;
    const double m = sum / r;
    return std::sqrt(std::max(0.0, (sum_sq - r * m * m) / (r - 1.0)) / r);
  }
};

int cmd_simulate(Command& cmd, const Scenario& s) {
  cmd.report()["scenario"] = s.name;
  const Environment& env = finite_env(s, "simulate");
  const Options& opt = cmd.opt();
  const std::uint64_t seed = opt.seed.value_or(s.simulation.seed);
  const std::size_t reps = opt.replications.value_or(s.simulation.replications);
  if (reps == 0) throw InvalidArgument("replications must be positive");
  const std::string order_text = opt.receiver_order.value_or(s.simulation.receiver_order);
  std::vector<int> perm;
  const auto order = ReceiverPolicy::parse_order(order_text, &perm);
  const ReceiverPolicy receiver = order == ReceiverPolicy::Order::kPermutation
                                      ? ReceiverPolicy::explicit_order(perm)
                                      : ReceiverPolicy::equilibrium_order(order);
  ProfileOptions popt;
  popt.force = opt.force;
  popt.substitutes_samples = opt.su_samples;
  popt.seed = seed;
  auto profile = std::make_shared<const EquilibriumProfile>(aon_rates(env.dp, env.prior, s.cost, popt));
  const int n = profile->num_senders();
  const Simulator sim(env.dp, env.prior, s.cost,
                      std::vector<SenderPolicy>(n, SenderPolicy::aon_equilibrium()), receiver, profile);
  EpisodeOptions eopt;
  eopt.round_cap = opt.round_cap.value_or(s.simulation.round_cap);
  eopt.record_rounds = false;
  const MonteCarloSummary mc = sim.monte_carlo(reps, seed, eopt);
  const JointSpace& space = env.prior.space();

  std::vector<std::string> header{"replication", "seed", "state", "total_rounds", "cost",
                                  "utility", "payoff", "stop_action"};
  for (int i = 1; i <= n; ++i) header.push_back("visits_" + sender_name(space, i));
  auto episodes = cmd.csv("episodes.csv", header);
  const double r = static_cast<double>(reps);
  std::vector<Moments> visits(n);
  Moments payoff, utility, cost, rounds;
  for (std::size_t k = 0; k < mc.episodes.size(); ++k) {
    const EpisodeTrace& t = mc.episodes[k];
    std::vector<Cell> row{k, t.seed, t.state_label, t.total_rounds, t.cost, t.utility, t.payoff,
                          env.dp.actions()[t.stop_action]};
    for (int i = 0; i < n; ++i) {
      row.emplace_back(t.visits[i]);
      visits[i].add(static_cast<double>(t.visits[i]));
    }
    episodes.row(row);
    payoff.add(t.payoff);
    utility.add(t.utility);
    cost.add(t.cost);
    rounds.add(static_cast<double>(t.total_rounds));
  }
  episodes.close();

  auto summary = cmd.csv("summary.csv", {"quantity", "theory", "empirical", "se"});
  struct Line {
    std::string name;
    double theory;
    const Moments* m;
  };
  std::vector<Line> lines;
  double total_visits = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double v = profile->expected_visits(StateGraph::root(), i);
    total_visits += v;
    lines.push_back({"visits_" + sender_name(space, i), v, &visits[i - 1]});
  }
  lines.push_back({"rounds", total_visits, &rounds});
  lines.push_back({"attention_cost", s.cost * total_visits, &cost});
  lines.push_back({"utility", profile->full_info_stopping(), &utility});
  lines.push_back({"receiver_payoff", profile->receiver_payoff(), &payoff});

  cmd.out() << "R=" << reps << " seed=" << seed << " order=" << receiver.describe() << '\n';
  cmd.out() << std::left << std::setw(22) << "quantity" << std::setw(14) << "theory" << std::setw(14)
            << "empirical" << std::setw(14) << "se"
            << "z\n";
  Json rows = Json::array();
  for (const auto& line : lines) {
    const double mean = line.m->mean(r);
    const double se = line.m->se(r);
    summary.row({line.name, line.theory, mean, se});
    const double z = se > 0 ? (mean - line.theory) / se : 0.0;
    cmd.out() << std::left << std::setw(22) << line.name << std::setw(14) << brief(line.theory)
              << std::setw(14) << brief(mean) << std::setw(14) << brief(se) << brief(z) << '\n';
    rows.push_back({{"quantity", line.name}, {"theory", line.theory}, {"empirical", mean}, {"se", se}});
  }
  summary.close();
  cmd.report()["monte_carlo"] = {{"replications", reps}, {"seed", seed},
                                 {"receiver", receiver.describe()}, {"summary", rows}};
  cmd.report()["profile"] = {{"receiver_payoff", profile->receiver_payoff()},
                             {"sender_payoffs", profile->sender_payoffs()},
                             {"is_equilibrium", profile->is_equilibrium()}};
  return cmd.finish(kExitOk);
}

// --- sweep -----------------------------------------------------------------

struct SweepParams {
  double p0 = 1.0;
  std::vector<double> p{1.0};
  std::optional<double> pc;
  std::optional<double> cost;
};

int cmd_sweep(Command& cmd, const std::optional<Scenario>& scenario) {
  const Options& opt = cmd.opt();
  SweepParams sp;
  if (scenario) {
    cmd.report()["scenario"] = scenario->name;
    sp.cost = scenario->cost;
    if (scenario->gaussian) {
      sp.p0 = scenario->gaussian->p0;
      if (!scenario->gaussian->p.empty()) sp.p = scenario->gaussian->p;
      sp.pc = scenario->gaussian->pc;
    }
  }
  if (opt.p0) sp.p0 = *opt.p0;
  if (!opt.p.empty()) sp.p = opt.p;
  if (opt.pc) sp.pc = *opt.pc;
  if (opt.cost) sp.cost = *opt.cost;
  const std::string& kind = opt.sweep_kind;
  cmd.report()["sweep_kind"] = kind;

  if (kind == "large-n") {
    const double c = sp.cost.value_or(0.01);
    const int n_max = opt.n_max.value_or(100);
    const LargeNCurve curve = large_n_gaussian(sp.p0, sp.p.at(0), c, opt.n_min, n_max);
    auto csv = cmd.csv("large_n.csv", {"n", "mse_term", "attention_cost", "visits", "payoff"});
    for (const auto& row : curve.rows) {
      csv.row({row.n, row.mse_term, row.attention_cost, row.visits, row.payoff});
    }
    csv.close();
    cmd.out() << "n=" << n_max << ": payoff " << brief(curve.rows.back().payoff)
              << ", n*cost " << brief(curve.scaled_cost_last) << '\n';
    cmd.report()["large_n"] = {{"payoff_tends_to_zero", curve.payoff_tends_to_zero},
                               {"scaled_cost_last", curve.scaled_cost_last}};
  } else if (kind == "alpha") {
    if (!sp.pc) throw InvalidArgument("alpha sweep needs --pc (or a gaussian block with pc)");
    const double p1 = sp.p.at(0);
    const double p2 = sp.p.size() > 1 ? sp.p[1] : p1;
    const double step = opt.grid_step.value_or(0.05);
    if (!(step > 0.0 && step <= 1.0)) throw InvalidArgument("grid step must lie in (0, 1]");
    const CorrelatedScenario cs{sp.p0, p1, p2, *sp.pc, 0.0, sp.cost.value_or(0.01)};
    auto csv = cmd.csv("alpha.csv", {"alpha", "u1", "u2", "u12", "vbar1", "vbar2", "payoff"});
    const int count = static_cast<int>(std::floor(1.0 / step + 1e-9));
    for (int k = 0; k <= count; ++k) {
      CorrelatedScenario at = cs;
      at.alpha = std::min(1.0, k * step);
      const CorrelatedValues v = correlated_values(at);
      csv.row({at.alpha, v.u1, v.u2, v.u12, v.vbar1, v.vbar2, v.payoff});
    }
    if (count * step < 1.0 - 1e-9) {
      CorrelatedScenario at = cs;
      at.alpha = 1.0;
      const CorrelatedValues v = correlated_values(at);
      csv.row({1.0, v.u1, v.u2, v.u12, v.vbar1, v.vbar2, v.payoff});
    }
    csv.close();
    const double pbar = correlation_threshold(sp.p0, p1, p2);
    const double at0 = payoff_at_alpha(cs, 0.0), at1 = payoff_at_alpha(cs, 1.0);
    cmd.out() << "p-bar " << brief(pbar) << "; pc " << brief(*sp.pc)
              << "; payoff alpha=0 " << brief(at0) << ", alpha=1 " << brief(at1)
              << (at1 > at0 ? " (correlation helps)" : " (correlation hurts)") << '\n';
    cmd.report()["alpha"] = {{"correlation_threshold", pbar}, {"payoff_alpha_0", at0},
                             {"payoff_alpha_1", at1}};
  } else if (kind == "symmetry") {
    const double q = opt.q.value_or(2.0);
    const SymmetryReport r =
        symmetry_gap(sp.p0, q, opt.senders, sp.cost.value_or(0.01), opt.grid_step.value_or(0.05));
    std::vector<std::string> header;
    for (int i = 1; i <= opt.senders; ++i) header.push_back("p_" + std::to_string(i));
    header.push_back("payoff");
    auto csv = cmd.csv("symmetry.csv", header);
    for (const auto& point : r.grid) {
      std::vector<Cell> row(point.p.begin(), point.p.end());
      row.emplace_back(point.payoff);
      csv.row(row);
    }
    csv.close();
    cmd.out() << "symmetric payoff " << brief(r.symmetric_payoff) << ", best grid payoff "
              << brief(r.best.payoff) << (r.symmetric_is_max ? " (symmetric is maximal)" : "")
              << '\n';
    cmd.report()["symmetry"] = {{"symmetric_payoff", r.symmetric_payoff},
                                {"best_payoff", r.best.payoff},
                                {"best_allocation", r.best.p},
                                {"symmetric_is_max", r.symmetric_is_max}};
  } else if (kind == "bridge") {
    const double p = sp.p.at(0);
    const double c = sp.cost.value_or(0.1);
    const BridgeSchedule sched = bridge_schedule(p, c, 11);
    auto csv = cmd.csv("bridge_schedule.csv", {"t", "variance"});
    for (std::size_t k = 0; k < sched.t.size(); ++k) csv.row({sched.t[k], sched.variance[k]});
    csv.close();
    const std::size_t paths = opt.replications.value_or(10000);
    Json j{{"horizon", sched.horizon}};
    if (paths > 0) {
      const BridgeCheck check = bridge_mc_check(p, c, paths, opt.seed.value_or(1), opt.steps, 11);
      auto mc = cmd.csv("bridge_check.csv", {"t", "analytic", "empirical", "se", "within"});
      for (const auto& row : check.rows) mc.row({row.t, row.analytic, row.empirical, row.se, row.within});
      mc.close();
      cmd.out() << "bridge Monte Carlo (" << paths << " paths): " << (check.pass ? "pass" : "FAIL") << '\n';
      j["mc_pass"] = check.pass;
    }
    cmd.out() << "T* = " << brief(sched.horizon) << ", endpoint variance "
              << brief(sched.variance.back()) << '\n';
    cmd.report()["bridge"] = j;
  } else if (kind == "market") {
    const IIDEnvironment env = default_abstention(opt.accuracy, opt.abstain);
    const int n_max = opt.n_max.value_or(400);
    CurveOptions copt;
    copt.allow_sampling = true;
    copt.seed = opt.seed.value_or(1);
    const auto residual = residual_value_curve(env, opt.n_min, n_max, copt);
    const auto error = decision_error_curve(env, opt.n_min, n_max, copt);
    auto csv = cmd.csv("market.csv", {"n", "residual_value", "scaled_residual", "residual_se",
                                      "decision_error", "decision_error_se", "exact"});
    for (std::size_t k = 0; k < residual.size(); ++k) {
      csv.row({residual[k].n, residual[k].value, residual[k].scaled, residual[k].se, error[k].value,
               error[k].se, residual[k].exact && error[k].exact});
    }
    csv.close();
    std::vector<int> ns;
    std::vector<double> reference;
    for (const auto& point : residual) {
      ns.push_back(point.n);
      reference.push_back(1.0 / (point.n + 1));
    }
    auto fits = cmd.csv("market_fit.csv",
                        {"curve", "kappa", "rho", "r2", "log_residual_sd", "first_n", "count", "decaying"});
    Json fj = Json::array();
    auto emit = [&](const std::string& name, const ExponentialFit& f) {
      fits.row({name, f.kappa, f.rho, f.r2, f.log_residual_sd, ns[f.first], f.count, f.decaying});
      fj.push_back({{"curve", name}, {"kappa", f.kappa}, {"rho", f.rho}, {"r2", f.r2}});
      cmd.out() << name << ": rho " << brief(f.rho) << ", r2 " << brief(f.r2) << '\n';
    };
    emit("residual_value", fit_exponential_rate(residual));
    emit("decision_error", fit_exponential_rate(error));
    emit("gaussian_reference", fit_exponential_rate(ns, reference));
    fits.close();
    cmd.report()["market"] = fj;
  } else {
    throw InvalidArgument("unknown sweep kind '" + kind + "' (large-n, alpha, symmetry, bridge, market)");
  }
  return cmd.finish(kExitOk);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConditionNotVerified*>(&e) || dynamic_cast<const AssumptionViolated*>(&e) ||
      dynamic_cast<const DegenerateCurve*>(&e)) {
    return kExitConditionFailure;
  }
  if (dynamic_cast<const RoundLimitExceeded*>(&e) || dynamic_cast<const BudgetExceeded*>(&e) ||
      dynamic_cast<const SubsetSpaceTooLarge*>(&e)) {
    return kExitRuntimeLimit;
  }
  return kExitInputError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Attention-market equilibria: check conditions, solve, simulate, sweep", "attnmarket"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool scenario_required) {
    auto* o = sub->add_option("--scenario", opt.scenario, "Scenario file (YAML)");
    if (scenario_required) o->required();
    sub->add_option("--out", opt.out,
                    std::string("Output directory (default $") + kOutDirVariable + " or " +
                        kDefaultOutDir + ")");
    sub->add_option("--seed", opt.seed, "Root seed");
  };
  auto* check = app.add_subcommand("check", "Check visit worth, substitutes and M-natural concavity");
  add_common(check, true);
  check->add_option("--su-samples", opt.su_samples, "Sampled garbling beliefs for the substitutes check");

  auto* solve = app.add_subcommand("solve", "Compute the AoN equilibrium profile or Gaussian closed forms");
  add_common(solve, true);
  solve->add_flag("--force", opt.force, "Solve even when the conditions fail");
  solve->add_option("--su-samples", opt.su_samples, "Sampled garbling beliefs for the substitutes check");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the AoN equilibrium");
  add_common(simulate, true);
  simulate->add_option("--replications", opt.replications, "Number of episodes");
  simulate->add_flag("--force", opt.force, "Simulate even when the conditions fail");
  simulate->add_option("--receiver-order", opt.receiver_order, "lowest | reversed | random | perm:2,1,...");
  simulate->add_option("--round-cap", opt.round_cap, "Maximum rounds per episode");
  simulate->add_option("--su-samples", opt.su_samples, "Sampled garbling beliefs for the substitutes check");

  auto* sweep = app.add_subcommand("sweep", "Curves: large-n, alpha, symmetry, bridge, market");
  add_common(sweep, false);
  sweep->add_option("--sweep-kind", opt.sweep_kind, "large-n | alpha | symmetry | bridge | market")->required();
  sweep->add_option("--grid-step", opt.grid_step, "Grid step (alpha, symmetry)");
  sweep->add_option("--p0", opt.p0, "Prior precision of the payoff state");
  sweep->add_option("--p", opt.p, "Sender precision(s)");
  sweep->add_option("--pc", opt.pc, "Common-signal precision (alpha)");
  sweep->add_option("--cost", opt.cost, "Attention cost");
  sweep->add_option("--q", opt.q, "Total sender precision (symmetry)");
  sweep->add_option("--senders", opt.senders, "Number of senders (symmetry)");
  sweep->add_option("--n-min", opt.n_min, "First n (large-n, market)");
  sweep->add_option("--n-max", opt.n_max, "Last n (large-n, market)");
  sweep->add_option("--accuracy", opt.accuracy, "Signal accuracy (market)");
  sweep->add_option("--abstain", opt.abstain, "Abstain utility (market)");
  sweep->add_option("--replications", opt.replications, "Bridge Monte Carlo paths (0 skips)");
  sweep->add_option("--steps", opt.steps, "Bridge time steps");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    std::optional<Scenario> scenario;
    if (!opt.scenario.empty()) scenario = load_scenario(opt.scenario);
    if (check->parsed()) {
      Command cmd("check", opt, out);
      return cmd_check(cmd, *scenario);
    }
    if (solve->parsed()) {
      Command cmd("solve", opt, out);
      return cmd_solve(cmd, *scenario);
    }
    if (simulate->parsed()) {
      Command cmd("simulate", opt, out);
      return cmd_simulate(cmd, *scenario);
    }
    Command cmd("sweep", opt, out);
    return cmd_sweep(cmd, scenario);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace attn::cli
