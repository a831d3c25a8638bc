#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coresched {

enum ExitCode : int { kExitOk = 0, kExitNotLearnable = 1, kExitUsage = 2, kExitInvalidScenario = 3 };

/// Entry point of the `core-sched` tool. `args` excludes the program name.
/// Data goes to `out`, diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace coresched
