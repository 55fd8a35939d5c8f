#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slp::cli {

// Runs the command line (without the program name). Exit codes: 0 success
// or all queries valid, 1 some query invalid, 2 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slp::cli
