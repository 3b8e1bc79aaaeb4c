#pragma once

#include <iosfwd>

namespace balnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2, kUnsupportedSize = 3 };

/// Parses argv, runs one command and maps failures onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace balnet::cli
