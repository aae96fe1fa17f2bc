#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace maxcucl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point behind the `maxcucl` binary: subcommands simulate, bounds and
/// experiment. Returns the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace maxcucl
