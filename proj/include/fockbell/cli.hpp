#pragma once

#include <ostream>
#include <span>
#include <string>

namespace fockbell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs the command line without the program name. Results go to `out` (or
/// the --out file), diagnostics to `err`. Returns the process exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Shortest round-trip-safe text with at most 15 significant digits, '.'
/// decimal point regardless of locale.
std::string format_number(double value);

}  // namespace fockbell::cli
