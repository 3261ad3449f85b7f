#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Entry point behind the `amplab` binary. `args` excludes the program
// name. Results go to `out` (JSON with --json), progress and errors to
// `err`; errors use the prefix "error:<usage|data|numeric>:<tag>: ".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amplab::cli
