#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spotex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitMismatch = 3;

/// Runs the `spotex` command line. `args` includes the program name.
/// Machine-readable output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spotex::cli
