#pragma once

#include <ostream>
#include <string_view>
#include <vector>

namespace lne::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_not_converged = 3;
inline constexpr int exit_infeasible = 4;

/// Runs one command. Records and CSV go to `out` (or --output), errors and
/// LNE_LOG diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "0.1,0.5,2" or "start:stop:step" (stop included when hit within rounding).
std::vector<double> parse_grid(std::string_view spec, std::string_view flag);

}  // namespace lne::cli
