#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thumbside::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kRejected = 2 };

/// Runs the command line `args` (without the program name). `serve` blocks
/// until SIGINT/SIGTERM.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace thumbside::cli
