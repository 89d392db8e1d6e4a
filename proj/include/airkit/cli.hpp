#pragma once

#include <iosfwd>

namespace airkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `airkit` tool. Writes results to `out` (or the
/// --output file) and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace airkit::cli
