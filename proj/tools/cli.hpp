#pragma once

#include <iosfwd>

namespace dtea::cli {

enum ExitCode : int { ok = 0, usage_error = 1, simulation_error = 2 };

/// Parses argv, runs one protocol and writes its artifacts. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dtea::cli
