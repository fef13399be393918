#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpekit::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kAnalysisError = 2 };

// Full command line without the program name. Output files go under --out;
// one summary line goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tpekit::cli
