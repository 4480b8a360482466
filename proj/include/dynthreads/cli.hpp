#pragma once

// The `dynthreads` command line. Exit codes: 0 ok or equal, 1 not equal or
// mismatch, 2 errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace dynthreads {

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynthreads
