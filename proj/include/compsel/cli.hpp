#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace compsel::cli {

/// Runs one CLI invocation (subcommand + flags, no program name).
/// Exit codes: 0 feasible result / success, 1 input or usage error,
/// 2 infeasible best-effort (the result file is still written).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace compsel::cli
