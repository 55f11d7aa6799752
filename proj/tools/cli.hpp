#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chordc::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 1,
    kCheckFailed = 2,
    kUnsupported = 3,
    kTooLarge = 4,
};

/// Runs one command line (args exclude the program name) and returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chordc::cli
