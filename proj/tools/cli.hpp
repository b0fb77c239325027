#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvestream::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

// Runs the command line `args` (args[0] is the program name). Data goes to
// `out`, summaries and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvestream::cli
