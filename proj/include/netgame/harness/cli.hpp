#pragma once

#include <ostream>

namespace netgame::harness {

enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kConfigError = 2, kAllRunsFailed = 3 };

/// Parses flags, trains and evaluates every seed, and writes
/// <out>/<name>/seed_<k>.csv, curves.csv and summary.json.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netgame::harness
