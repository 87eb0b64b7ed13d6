#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcs::cli {

inline constexpr int kExitOk = 0;
/// A gated check did not hold (matrix implications, Kraft sum).
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitGuard = 4;

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcs::cli
