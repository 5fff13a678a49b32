#pragma once

/// @file cli.hpp
/// @brief Command-line front end of dvfs-sim.
///
/// Exit codes: 0 success, 1 domain refusal (or failed verification), 2 usage
/// error.

#include <iosfwd>
#include <string>
#include <vector>

namespace dvfs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRefused = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command; `args` excludes the program name.
[[nodiscard]] auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
    -> int;

/// argv entry point writing to stdout/stderr.
[[nodiscard]] auto run(int argc, char** argv) -> int;

} // namespace dvfs::cli
