#pragma once

#include <iosfwd>

namespace mcheck::cli {

enum ExitCode : int { kYes = 0, kNo = 1, kError = 2 };

/// Runs `mcheck check|index|sample|oracle|bench` with the given arguments
/// (argv[0] is the program name) and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcheck::cli
