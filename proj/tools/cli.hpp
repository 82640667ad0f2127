#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace assistfair {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 claim or simulation failure, 2 usage, config or precondition error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace assistfair
