#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carefree::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Entry point for `carefree <subcommand> [flags]`. Subcommands:
/// counterexample, simulate, check-adjuster, ebh.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carefree::cli
