#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace suprec::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,  // recover --strict mismatch, or a failed verify suite
  kInvalid = 2,
  kBudget = 3,
};

/// Runs the command line `args` (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace suprec::cli
