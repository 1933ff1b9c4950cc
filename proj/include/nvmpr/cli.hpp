#pragma once

#include <iosfwd>

namespace nvmpr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;        // I/O and unexpected errors
inline constexpr int kExitConfigError = 2;    // bad command line, config or input file
inline constexpr int kExitNonConvergence = 3; // integration did not converge or a numerical check failed

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nvmpr
