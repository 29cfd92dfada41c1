#pragma once

#include <iosfwd>

namespace avgkernel::cli {

/// Exit codes of the avgkernel tool.
enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kNumeric = 3,
};

/// Runs `avgkernel <rule|converge|report|table3|check> ...`, writing results
/// to out and diagnostics to err. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace avgkernel::cli
