#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vemcdr::cli {

/// Runs the command line `args` (without the program name). Returns 0 on
/// success, 1 on usage or input errors, 2 on numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace vemcdr::cli
