#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fsdim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitUnresolved = 2,
  kExitBudget = 3,
};

// Parses `args` (without the program name), runs one subcommand and
// returns its exit status.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsdim::cli
