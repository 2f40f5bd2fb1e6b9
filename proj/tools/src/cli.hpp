#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steinerwl {

// Runs the command-line tool. `args` excludes the program name. Returns the
// process exit code: 0 on success, 1 on operational failure (one stderr line
// starting with "error: "), 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steinerwl
