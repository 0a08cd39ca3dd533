#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gridflex::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInfeasibleLevels = 2,
  kVerifyGapExceeded = 3,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`. `GRIDFLEX_THREADS` sets the --threads default.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridflex::cli
