#pragma once

#include <iosfwd>

namespace chorin::cli {

/// Exit codes of the chorin tool.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNumericalFailure = 2,
  kAcceptanceFailure = 3,
};

/// Subcommands: run-study, single-run, validate, plot-emit. Errors are printed
/// to `err` as "error[CODE]: message".
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chorin::cli
