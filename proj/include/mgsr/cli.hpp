#pragma once

/// @file cli.hpp
/// @brief The `mgsr` command-line front end, callable in-process.
///
/// Subcommands: datagen, solve, sweep, spectrum, windows, weights.
/// Exit codes: 0 success / converged, 1 I/O or runtime failure,
/// 2 usage or configuration error, 3 solve did not converge within N_iter.

#include <iosfwd>
#include <string>
#include <vector>

namespace mgsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mgsr::cli
