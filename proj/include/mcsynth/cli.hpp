#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mcsynth {

/// Runs one CLI invocation. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`. Returns the process exit code: 0 success,
/// 1 usage or I/O failure, 2 validation violations, 3 partial run failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcsynth
