#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stlrank::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,  ///< I/O or unexpected runtime failure
  kUsageError = 2,      ///< bad flags, parse errors, schema errors, invalid parameters
};

/// Runs the tool with `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics and summaries to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stlrank::cli
