#pragma once

#include <string>
#include <vector>

namespace qhyst::cli {

// Dispatches one command line (without the program name). Returns the process
// exit code: 0 success, 2 validation/usage error, 3 runtime failure.
int run(const std::vector<std::string>& args);

}  // namespace qhyst::cli
