#pragma once

#include <iosfwd>

namespace psoconv {

// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitUsage = 64;

// Entry point of `psoconv`; writes results to `out` (or --output) and messages to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psoconv
