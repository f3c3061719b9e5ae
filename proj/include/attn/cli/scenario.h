#ifndef ATTN_CLI_SCENARIO_H_
#define ATTN_CLI_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attn/decision.h"
#include "attn/errors.h"

namespace attn::cli {

inline constexpr int kSchemaVersion = 1;

// Parse or validation failure, located in the scenario file.
class ScenarioError : public InvalidArgument {
 public:
  ScenarioError(const std::string& source, int line, const std::string& field,
                const std::string& message);
};

struct GaussianBlock {
  double p0 = 1.0;
  std::vector<double> p;
  std::optional<double> pc;
  double alpha = 0.0;
};

struct SimulationBlock {
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  std::string receiver_order = "lowest";
  std::size_t round_cap = 1'000'000;
};

struct Scenario {
  std::string source;
  std::string name;
  std::string description;
  double cost = 0.0;
  std::optional<Environment> environment;
  std::optional<GaussianBlock> gaussian;
  SimulationBlock simulation;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

}  // namespace attn::cli

#endif  // ATTN_CLI_SCENARIO_H_
