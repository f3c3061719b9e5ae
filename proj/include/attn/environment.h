#ifndef ATTN_ENVIRONMENT_H_
#define ATTN_ENVIRONMENT_H_

// Finite probability core: component spaces, joint priors, beliefs,
// experiments and Bayes updating.
//
// A state of the world is a tuple (w_0, w_1, ..., w_n). Component 0 is the
// payoff component no sender can reveal directly; component i >= 1 belongs to
// sender i. Joint states are enumerated row-major over value indices
// (component 0 most significant) and every distribution is a dense vector over
// that enumeration.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attn {

inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kDerivedTolerance = 1e-10;

struct ComponentSpace {
  std::string name;
  std::vector<std::string> values;
};

class JointSpace {
 public:
  // components[0] is the payoff component; components.size() - 1 senders.
  explicit JointSpace(std::vector<ComponentSpace> components);

  int num_senders() const { return static_cast<int>(components_.size()) - 1; }
  int num_components() const { return static_cast<int>(components_.size()); }
  std::size_t num_states() const { return num_states_; }

  const ComponentSpace& component(int k) const;
  int num_values(int k) const { return static_cast<int>(component(k).values.size()); }
  std::size_t stride(int k) const { return strides_.at(k); }

  int value_index(std::size_t state, int component) const {
    return static_cast<int>((state / strides_[component]) %
                            components_[component].values.size());
  }
  std::vector<int> decode(std::size_t state) const;
  std::size_t encode(std::span<const int> digits) const;

  // Index of `label` in component k; throws UnknownComponent.
  int find_value(int component, std::string_view label) const;
  std::string state_label(std::size_t state) const;

  void check_sender(int sender) const;

 private:
  std::vector<ComponentSpace> components_;
  std::vector<std::size_t> strides_;
  std::size_t num_states_ = 0;
};

using SpacePtr = std::shared_ptr<const JointSpace>;

// A subset of senders {1..n}; sender i lives in bit i-1.
class SenderSet {
 public:
  constexpr SenderSet() = default;
  static constexpr SenderSet from_bits(std::uint32_t bits) {
    SenderSet s;
    s.bits_ = bits;
    return s;
  }
  static SenderSet all(int num_senders);
  static SenderSet of(std::initializer_list<int> senders);

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int sender) const { return (bits_ >> (sender - 1)) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  SenderSet with(int sender) const { return from_bits(bits_ | (1U << (sender - 1))); }
  SenderSet without(int sender) const { return from_bits(bits_ & ~(1U << (sender - 1))); }
  bool is_subset_of(SenderSet other) const { return (bits_ & ~other.bits_) == 0; }
  std::vector<int> members() const;
  std::string to_string() const;  // "1;3" or "-" when empty

  friend constexpr bool operator==(SenderSet a, SenderSet b) { return a.bits_ == b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

// Mixed-radix code of the realisation of the components in a sender subset.
// Code 0 of the empty subset is the single "nothing revealed" realisation.
class SubsetCoder {
 public:
  SubsetCoder(const JointSpace& space, SenderSet subset);

  SenderSet subset() const { return subset_; }
  std::size_t num_codes() const { return num_codes_; }
  std::size_t code_of_state(std::size_t state) const;
  // digits indexed by component (size n+1); entries outside the subset ignored.
  std::size_t code_of_digits(std::span<const int> digits) const;
  // Realisation indexed by component; -1 outside the subset.
  std::vector<int> decode(std::size_t code) const;

 private:
  const JointSpace* space_;
  SenderSet subset_;
  std::vector<int> senders_;
  std::vector<std::size_t> radix_stride_;
  std::size_t num_codes_ = 1;
};

class Belief {
 public:
  Belief(SpacePtr space, std::vector<double> mass);

  const JointSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> mass() const { return mass_; }
  double operator[](std::size_t state) const { return mass_[state]; }
  std::size_t size() const { return mass_.size(); }

  std::vector<double> marginal(int component) const;
  bool support_within(const Belief& other) const;

 private:
  SpacePtr space_;
  std::vector<double> mass_;
};

// The common prior. Same representation as a belief, kept as its own type so
// functions that quantify over "the support of the prior" say so in their
// signature.
class JointPrior {
 public:
  JointPrior(SpacePtr space, std::vector<double> mass);

  // Marginal of w_0 times, for each sender, a conditional row P(w_i | w_0).
  // conditionals[i-1][w0][wi].
  static JointPrior from_product(
      SpacePtr space, std::span<const double> state_marginal,
      const std::vector<std::vector<std::vector<double>>>& conditionals);

  const Belief& belief() const { return belief_; }
  operator const Belief&() const { return belief_; }  // NOLINT
  const JointSpace& space() const { return belief_.space(); }
  const SpacePtr& space_ptr() const { return belief_.space_ptr(); }
  std::span<const double> mass() const { return belief_.mass(); }
  double operator[](std::size_t state) const { return belief_[state]; }

 private:
  Belief belief_;
};

// A Blackwell experiment on one sender's component: kernel[value][message].
class Experiment {
 public:
  static constexpr std::string_view kNullMessage = "null";

  Experiment(int sender, std::vector<std::string> messages,
             std::vector<std::vector<double>> kernel);

  static Experiment fully_revealing(const JointSpace& space, int sender);
  // Reveals w_i with probability `reveal`, otherwise sends the null message.
  static Experiment all_or_nothing(const JointSpace& space, int sender, double reveal);
  static Experiment uninformative(const JointSpace& space, int sender);
  // Reports the true value with probability 1 - flip, otherwise a uniformly
  // drawn different value.
  static Experiment symmetric_channel(const JointSpace& space, int sender, double flip);

  int sender() const { return sender_; }
  int num_values() const { return static_cast<int>(kernel_.size()); }
  int num_messages() const { return static_cast<int>(messages_.size()); }
  const std::vector<std::string>& messages() const { return messages_; }
  double likelihood(int value, int message) const { return kernel_[value][message]; }
  int find_message(std::string_view label) const;

 private:
  int sender_;
  std::vector<std::string> messages_;
  std::vector<std::vector<double>> kernel_;
};

// sender index -> value index.
using Assignment = std::map<int, int>;

Assignment make_assignment(const JointSpace& space,
                           const std::map<int, std::string>& labels);

Belief condition_on_components(const Belief& belief, const Assignment& assignment);
Belief condition_on_components(const JointPrior& prior, const Assignment& assignment);

// L(m) = sum_w lambda(w_i, m) mu(w).
std::vector<double> message_distribution(const Belief& belief, const Experiment& experiment);

Belief update(const Belief& belief, const Experiment& experiment, int message);
Belief update(const Belief& belief, const Experiment& experiment, std::string_view message);

// True iff the belief carries no direct information about w_i: for every
// realisation of the other senders' components, the likelihood ratios across
// values of w_i match the prior's.
bool no_direct_info(const Belief& belief, const JointPrior& prior, int sender);

}  // namespace attn

#endif  // ATTN_ENVIRONMENT_H_
