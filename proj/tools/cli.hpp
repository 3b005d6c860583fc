#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gradnet::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kCheckFailed = 2,
    kIoError = 3,
    kDiverged = 4,
    kInsufficientData = 5,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits, enough to round-trip any double.
std::string format_number(double x);

}  // namespace gradnet::cli
