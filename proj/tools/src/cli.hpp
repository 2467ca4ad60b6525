#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optdict::cli {

/// Runs the tool on argv[1..] and returns the process exit code:
/// 0 success, 1 internal numerical failure, 2 invalid input, 3 infeasible,
/// 4 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optdict::cli
