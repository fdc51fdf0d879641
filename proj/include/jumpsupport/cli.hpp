#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jumpsupport::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 1, NumericalFailure = 2, NegativeVerdict = 3 };

/// Runs one CLI invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jumpsupport::cli
