#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iodnet {

/// Exit codes of every subcommand.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1, // property violated, invalid model, transformation error
  exit_io = 2,      // unreadable input, unwritable output, bad command line
  exit_unknown = 3  // verdict unknown because exploration was truncated
};

/// Runs `iodnet <args...>` (args exclude the program name). `out` receives
/// primary output, `err` diagnostics. `tty` enables color under
/// IODNET_COLOR=auto.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool tty = false);

} // namespace iodnet
