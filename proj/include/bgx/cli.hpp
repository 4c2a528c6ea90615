#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bgx::cli {

/// Runs the `bgx` command line with `args` (program name excluded) and
/// returns the process exit code. Diagnostics go to `err`, help text to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bgx::cli
