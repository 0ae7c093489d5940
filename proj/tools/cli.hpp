#pragma once

#include <iosfwd>

namespace goalspot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for `goalspot <subcommand> ...`. Returns the process exit code.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace goalspot::cli
