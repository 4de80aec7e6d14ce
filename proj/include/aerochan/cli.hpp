#pragma once

#include <iosfwd>

namespace aerochan {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,   // bad arguments, scenario or domain
  kExitNumeric = 3,  // numeric failure or oracle budget exceeded
  kExitIo = 4,
};

/// Entry point of the `aerochan` tool. Tables go to `out` when no output
/// path is configured; logs and the summary line go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aerochan
