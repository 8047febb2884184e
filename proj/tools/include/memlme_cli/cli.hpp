#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memlme::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Runs the command line (without the program name). Diagnostics go to err,
// progress and summaries to out. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memlme::cli
