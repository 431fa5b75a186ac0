#pragma once

#include <iosfwd>

namespace ultragap::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
  Ok = 0,
  GeneralMetric = 1,
  Malformed = 2,
  NotAMetric = 3,
  SolverFailure = 4,
};

/// Runs one command line. Artifacts go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ultragap::cli
