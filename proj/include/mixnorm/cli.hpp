#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixnorm {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;

/// Runs the `mixnorm` command line. `args` excludes the program name.
/// Results go to `out` (or --output), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixnorm
