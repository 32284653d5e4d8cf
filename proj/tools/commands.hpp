#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kspec::cli {

/// Stable exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kAmbiguous = 3,
    kInadmissible = 4,
    kNumerical = 5,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kspec::cli
