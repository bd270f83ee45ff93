#pragma once

#include <iosfwd>

namespace gamma_lab {

/// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       // unexpected error
  kExitConfig = 2,        // malformed config or command line
  kExitPrecondition = 3,  // parameter out of domain, degenerate input
  kExitAssertion = 4,     // a verification step failed
};

/// Entry point of `gamma-lab`; writes results to out and diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gamma_lab
