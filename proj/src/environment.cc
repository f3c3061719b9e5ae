#include "attn/environment.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "attn/errors.h"

namespace attn {

namespace {

void check_distribution(std::span<const double> mass, double tolerance,
                        const std::string& what) {
  double total = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) {
      throw InvalidArgument(what + ": probabilities must be finite and non-negative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": probabilities sum to " << total << ", expected 1";
    throw InvalidArgument(os.str());
  }
}

std::vector<double> normalized(std::vector<double> mass, double total) {
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace

// ---------------------------------------------------------------------------
// JointSpace

JointSpace::JointSpace(std::vector<ComponentSpace> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw InvalidArgument("joint space needs at least the payoff component");
  }
  strides_.assign(components_.size(), 1);
  num_states_ = 1;
  for (int k = static_cast<int>(components_.size()) - 1; k >= 0; --k) {
    const auto& values = components_[k].values;
    if (values.empty()) {
      throw InvalidArgument("component " + std::to_string(k) + " has no values");
    }
    std::set<std::string> seen(values.begin(), values.end());
    if (seen.size() != values.size()) {
      throw InvalidArgument("component " + std::to_string(k) + " has duplicate labels");
    }
    strides_[k] = num_states_;
    num_states_ *= values.size();
  }
}

const ComponentSpace& JointSpace::component(int k) const {
  if (k < 0 || k >= num_components()) {
    throw UnknownComponent("component index " + std::to_string(k) + " out of range");
  }
  return components_[k];
}

std::vector<int> JointSpace::decode(std::size_t state) const {
  std::vector<int> digits(components_.size());
  for (int k = 0; k < num_components(); ++k) digits[k] = value_index(state, k);
  return digits;
}

std::size_t JointSpace::encode(std::span<const int> digits) const {
  std::size_t state = 0;
  for (int k = 0; k < num_components(); ++k) {
    state += static_cast<std::size_t>(digits[k]) * strides_[k];
  }
  return state;
}

int JointSpace::find_value(int k, std::string_view label) const {
  const auto& values = component(k).values;
  auto it = std::find(values.begin(), values.end(), label);
  if (it == values.end()) {
    throw UnknownComponent("component " + std::to_string(k) + " has no value '" +
                           std::string(label) + "'");
  }
  return static_cast<int>(it - values.begin());
}

std::string JointSpace::state_label(std::size_t state) const {
  std::string out;
  for (int k = 0; k < num_components(); ++k) {
    if (k > 0) out += ';';
    out += components_[k].values[value_index(state, k)];
  }
  return out;
}

void JointSpace::check_sender(int sender) const {
  if (sender < 1 || sender > num_senders()) {
    throw UnknownComponent("sender index " + std::to_string(sender) +
                           " out of range 1.." + std::to_string(num_senders()));
  }
}

// ---------------------------------------------------------------------------
// SenderSet

SenderSet SenderSet::all(int num_senders) {
  if (num_senders < 0 || num_senders > 31) throw InvalidArgument("at most 31 senders");
  return from_bits(num_senders == 0 ? 0U : (~0U >> (32 - num_senders)));
}

SenderSet SenderSet::of(std::initializer_list<int> senders) {
  SenderSet s;
  for (int i : senders) s = s.with(i);
  return s;
}

int SenderSet::size() const { return std::popcount(bits_); }

std::vector<int> SenderSet::members() const {
  std::vector<int> out;
  for (int i = 1; i <= 32; ++i) {
    if ((bits_ >> (i - 1)) & 1U) out.push_back(i);
  }
  return out;
}

std::string SenderSet::to_string() const {
  if (empty()) return "-";
  std::string out;
  for (int i : members()) {
    if (!out.empty()) out += ';';
    out += std::to_string(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SubsetCoder

SubsetCoder::SubsetCoder(const JointSpace& space, SenderSet subset)
    : space_(&space), subset_(subset), senders_(subset.members()) {
  for (int i : senders_) space.check_sender(i);
  radix_stride_.resize(senders_.size());
  num_codes_ = 1;
  for (std::size_t k = senders_.size(); k-- > 0;) {
    radix_stride_[k] = num_codes_;
    num_codes_ *= static_cast<std::size_t>(space.num_values(senders_[k]));
  }
}

std::size_t SubsetCoder::code_of_state(std::size_t state) const {
  std::size_t code = 0;
  for (std::size_t k = 0; k < senders_.size(); ++k) {
    code += static_cast<std::size_t>(space_->value_index(state, senders_[k])) * radix_stride_[k];
  }
  return code;
}

std::size_t SubsetCoder::code_of_digits(std::span<const int> digits) const {
  std::size_t code = 0;
  for (std::size_t k = 0; k < senders_.size(); ++k) {
    code += static_cast<std::size_t>(digits[senders_[k]]) * radix_stride_[k];
  }
  return code;
}

std::vector<int> SubsetCoder::decode(std::size_t code) const {
  std::vector<int> digits(space_->num_components(), -1);
  for (std::size_t k = 0; k < senders_.size(); ++k) {
    const auto radix = static_cast<std::size_t>(space_->num_values(senders_[k]));
    digits[senders_[k]] = static_cast<int>((code / radix_stride_[k]) % radix);
  }
  return digits;
}

// ---------------------------------------------------------------------------
// Belief / JointPrior

Belief::Belief(SpacePtr space, std::vector<double> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
  if (!space_) throw InvalidArgument("belief without a joint space");
  if (mass_.size() != space_->num_states()) {
    throw InvalidArgument("belief has " + std::to_string(mass_.size()) +
                          " entries, joint space has " + std::to_string(space_->num_states()));
  }
  check_distribution(mass_, kNormalizationTolerance, "belief");
}

std::vector<double> Belief::marginal(int component) const {
  std::vector<double> out(space_->num_values(component), 0.0);
  for (std::size_t s = 0; s < mass_.size(); ++s) {
    out[space_->value_index(s, component)] += mass_[s];
  }
  return out;
}

bool Belief::support_within(const Belief& other) const {
  for (std::size_t s = 0; s < mass_.size(); ++s) {
    if (mass_[s] > 0.0 && other.mass_[s] <= 0.0) return false;
  }
  return true;
}

JointPrior::JointPrior(SpacePtr space, std::vector<double> mass)
    : belief_(std::move(space), std::move(mass)) {}

JointPrior JointPrior::from_product(
    SpacePtr space, std::span<const double> state_marginal,
    const std::vector<std::vector<std::vector<double>>>& conditionals) {
  const int n = space->num_senders();
  if (static_cast<int>(state_marginal.size()) != space->num_values(0)) {
    throw InvalidArgument("state marginal has the wrong number of entries");
  }
  check_distribution(state_marginal, kNormalizationTolerance, "state marginal");
  if (static_cast<int>(conditionals.size()) != n) {
    throw InvalidArgument("need one conditional table per sender");
  }
  for (int i = 1; i <= n; ++i) {
    const auto& table = conditionals[i - 1];
    if (static_cast<int>(table.size()) != space->num_values(0)) {
      throw InvalidArgument("sender " + std::to_string(i) +
                            ": need one conditional row per state value");
    }
    for (std::size_t w0 = 0; w0 < table.size(); ++w0) {
      if (static_cast<int>(table[w0].size()) != space->num_values(i)) {
        throw InvalidArgument("sender " + std::to_string(i) + " row " +
                              space->component(0).values[w0] + ": wrong width");
      }
      check_distribution(table[w0], kNormalizationTolerance,
                         "sender " + std::to_string(i) + " row " +
                             space->component(0).values[w0]);
    }
  }
  std::vector<double> mass(space->num_states());
  for (std::size_t s = 0; s < mass.size(); ++s) {
    const int w0 = space->value_index(s, 0);
    double m = state_marginal[w0];
    for (int i = 1; i <= n; ++i) m *= conditionals[i - 1][w0][space->value_index(s, i)];
    mass[s] = m;
  }
  return JointPrior(std::move(space), std::move(mass));
}

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(int sender, std::vector<std::string> messages,
                       std::vector<std::vector<double>> kernel)
    : sender_(sender), messages_(std::move(messages)), kernel_(std::move(kernel)) {
  if (sender_ < 1) throw UnknownComponent("experiments belong to senders 1..n");
  if (messages_.empty()) throw InvalidArgument("experiment needs at least one message");
  std::set<std::string> seen(messages_.begin(), messages_.end());
  if (seen.size() != messages_.size()) {
    throw InvalidArgument("experiment message labels must be unique");
  }
  if (kernel_.empty()) throw InvalidArgument("experiment kernel is empty");
  for (std::size_t v = 0; v < kernel_.size(); ++v) {
    if (kernel_[v].size() != messages_.size()) {
      throw InvalidArgument("experiment row " + std::to_string(v) + " has the wrong width");
    }
    check_distribution(kernel_[v], kNormalizationTolerance,
                       "experiment row " + std::to_string(v));
  }
}

Experiment Experiment::fully_revealing(const JointSpace& space, int sender) {
  return all_or_nothing(space, sender, 1.0);
}

Experiment Experiment::all_or_nothing(const JointSpace& space, int sender, double reveal) {
  space.check_sender(sender);
  if (!(reveal >= 0.0 && reveal <= 1.0)) {
    throw InvalidArgument("AoN reveal probability must lie in [0, 1]");
  }
  const auto& values = space.component(sender).values;
  std::vector<std::string> messages = values;
  messages.emplace_back(kNullMessage);
  const std::size_t k = values.size();
  std::vector<std::vector<double>> kernel(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t v = 0; v < k; ++v) {
    kernel[v][v] = reveal;
    kernel[v][k] = 1.0 - reveal;
  }
  return Experiment(sender, std::move(messages), std::move(kernel));
}

Experiment Experiment::uninformative(const JointSpace& space, int sender) {
  space.check_sender(sender);
  const std::size_t k = space.component(sender).values.size();
  return Experiment(sender, {std::string(kNullMessage)},
                    std::vector<std::vector<double>>(k, std::vector<double>{1.0}));
}

Experiment Experiment::symmetric_channel(const JointSpace& space, int sender, double flip) {
  space.check_sender(sender);
  if (!(flip >= 0.0 && flip <= 1.0)) throw InvalidArgument("flip probability must lie in [0, 1]");
  const auto& values = space.component(sender).values;
  const std::size_t k = values.size();
  std::vector<std::vector<double>> kernel(k, std::vector<double>(k, 0.0));
  for (std::size_t v = 0; v < k; ++v) {
    if (k == 1) {
      kernel[v][v] = 1.0;
      continue;
    }
    for (std::size_t m = 0; m < k; ++m) {
      kernel[v][m] = (m == v) ? 1.0 - flip : flip / static_cast<double>(k - 1);
    }
  }
  return Experiment(sender, values, std::move(kernel));
}

int Experiment::find_message(std::string_view label) const {
  auto it = std::find(messages_.begin(), messages_.end(), label);
  if (it == messages_.end()) {
    throw InvalidArgument("experiment has no message '" + std::string(label) + "'");
  }
  return static_cast<int>(it - messages_.begin());
}

// ---------------------------------------------------------------------------
// Operations

Assignment make_assignment(const JointSpace& space,
                           const std::map<int, std::string>& labels) {
  Assignment out;
  for (const auto& [sender, label] : labels) {
    space.check_sender(sender);
    out[sender] = space.find_value(sender, label);
  }
  return out;
}

Belief condition_on_components(const Belief& belief, const Assignment& assignment) {
  const JointSpace& space = belief.space();
  for (const auto& [sender, value] : assignment) {
    space.check_sender(sender);
    if (value < 0 || value >= space.num_values(sender)) {
      throw UnknownComponent("value index " + std::to_string(value) + " out of range for sender " +
                             std::to_string(sender));
    }
  }
  std::vector<double> mass(belief.size(), 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < mass.size(); ++s) {
    bool match = true;
    for (const auto& [sender, value] : assignment) {
      if (space.value_index(s, sender) != value) {
        match = false;
        break;
      }
    }
    if (match) {
      mass[s] = belief[s];
      total += belief[s];
    }
  }
  if (total <= 0.0) throw ZeroMassEvent("conditioning event has probability zero");
  return Belief(belief.space_ptr(), normalized(std::move(mass), total));
}

Belief condition_on_components(const JointPrior& prior, const Assignment& assignment) {
  return condition_on_components(prior.belief(), assignment);
}

std::vector<double> message_distribution(const Belief& belief, const Experiment& experiment) {
  const JointSpace& space = belief.space();
  space.check_sender(experiment.sender());
  if (experiment.num_values() != space.num_values(experiment.sender())) {
    throw InvalidArgument("experiment kernel does not match the sender's component");
  }
  const std::vector<double> marginal = belief.marginal(experiment.sender());
  std::vector<double> out(experiment.num_messages(), 0.0);
  for (int v = 0; v < experiment.num_values(); ++v) {
    if (marginal[v] == 0.0) continue;
    for (int m = 0; m < experiment.num_messages(); ++m) {
      out[m] += marginal[v] * experiment.likelihood(v, m);
    }
  }
  return out;
}

Belief update(const Belief& belief, const Experiment& experiment, int message) {
  const JointSpace& space = belief.space();
  space.check_sender(experiment.sender());
  if (message < 0 || message >= experiment.num_messages()) {
    throw InvalidArgument("message index out of range");
  }
  const int sender = experiment.sender();
  std::vector<double> mass(belief.size());
  double total = 0.0;
  for (std::size_t s = 0; s < mass.size(); ++s) {
    mass[s] = belief[s] * experiment.likelihood(space.value_index(s, sender), message);
    total += mass[s];
  }
  if (total <= 0.0) {
    throw ZeroProbabilityMessage("message '" + experiment.messages()[message] +
                                 "' has probability zero under the current belief");
  }
  return Belief(belief.space_ptr(), normalized(std::move(mass), total));
}

Belief update(const Belief& belief, const Experiment& experiment, std::string_view message) {
  return update(belief, experiment, experiment.find_message(message));
}

bool no_direct_info(const Belief& belief, const JointPrior& prior, int sender) {
  const JointSpace& space = belief.space();
  space.check_sender(sender);
  const SenderSet others = SenderSet::all(space.num_senders()).without(sender);
  const SubsetCoder coder(space, others);
  const int k = space.num_values(sender);
  // Joint masses of (w_i, w_{-i}) under belief and prior.
  std::vector<double> mu(coder.num_codes() * k, 0.0);
  std::vector<double> mu0(coder.num_codes() * k, 0.0);
  for (std::size_t s = 0; s < belief.size(); ++s) {
    const std::size_t idx = coder.code_of_state(s) * k + space.value_index(s, sender);
    mu[idx] += belief[s];
    mu0[idx] += prior[s];
  }
  constexpr double kRelative = 1e-9;
  for (std::size_t w = 0; w < coder.num_codes(); ++w) {
    double prior_mass = 0.0;
    for (int v = 0; v < k; ++v) prior_mass += mu0[w * k + v];
    if (prior_mass <= 0.0) {
      for (int v = 0; v < k; ++v) {
        if (mu[w * k + v] > 0.0) return false;
      }
      continue;
    }
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const double lhs = mu[w * k + a] * mu0[w * k + b];
        const double rhs = mu[w * k + b] * mu0[w * k + a];
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        if (std::abs(lhs - rhs) > kRelative * scale) return false;
      }
    }
  }
  return true;
}

}  // namespace attn
