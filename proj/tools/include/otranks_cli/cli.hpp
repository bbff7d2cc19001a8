#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otranks::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalError = 3,
  kDataError = 4,
};

/// Runs the command line `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otranks::cli
