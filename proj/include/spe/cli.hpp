// Command-line front end: subcommand dispatch over the solver library.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spe::cli {

/**
 * Runs one CLI invocation. `args` holds the arguments after the program
 * name. Human-readable results go to `out`; error messages go to `err`.
 * Returns the process exit code: 0 for yes/witness/value results, 1 for
 * no/none results, 2 for usage or input errors.
 */
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace spe::cli
