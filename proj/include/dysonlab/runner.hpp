#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dysonlab {

// command-line entry point, callable in-process for tests.  `args` excludes
// the program name.  Returns the process exit code: 0 on success, 1 on a
// runtime failure (with the failing module and simulation time on `err`),
// 2 on a config or flag problem (with a line/field diagnostic on `err`).
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace dysonlab
