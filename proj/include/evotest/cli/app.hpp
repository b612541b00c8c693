#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evotest::cli {

/// Process exit codes shared by every subcommand.
enum exit_code : int {
    exit_full = 0,     // every feasible target covered
    exit_partial = 1,  // some feasible target left uncovered
    exit_error = 2,    // bad flags, unreadable or invalid input
};

/// Runs `evotest` with `args` (without the program name). Tabular and
/// machine-readable output goes to `out`; the resolved config and all
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evotest::cli
