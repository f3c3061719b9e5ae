#ifndef ATTN_CLI_APP_H_
#define ATTN_CLI_APP_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace attn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitConditionFailure = 2,
  kExitRuntimeLimit = 3,
};

// Default output directory when --out is not given.
inline constexpr const char* kOutDirVariable = "ATTNMARKET_OUT";
inline constexpr const char* kDefaultOutDir = "attnmarket-out";

// args[0] is the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace attn::cli

#endif  // ATTN_CLI_APP_H_
