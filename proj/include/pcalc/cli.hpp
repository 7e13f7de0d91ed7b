#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcalc {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitTrue = 0,
    kExitFalse = 1,
    kExitUnknown = 2,
    kExitUsage = 3,
};

/// Runs one pcalc command; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcalc
