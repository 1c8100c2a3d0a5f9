#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace topoforge {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

/// Runs `topoforge <args...>` (program name excluded) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topoforge
