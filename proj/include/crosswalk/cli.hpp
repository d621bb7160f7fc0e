#pragma once

#include <iosfwd>

namespace crosswalk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Entry point of the `crosswalk` tool. Data goes to `out`, diagnostics and
// timings to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace crosswalk
