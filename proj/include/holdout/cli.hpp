#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holdout::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kInfeasible = 4,
    kCertificateFailed = 5,
};

// Runs the command line `args` (program name excluded) and returns the exit
// code. Everything a command prints goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holdout::cli
