#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpilot::cli {

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Diagnostics go to `err` as a single "error: ..." line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpilot::cli
