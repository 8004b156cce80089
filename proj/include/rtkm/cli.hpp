#ifndef RTKM_CLI_HPP
#define RTKM_CLI_HPP

#include <iosfwd>

namespace rtkm {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumeric = 4 };

/// Entry point of the `rtkm` tool: fit, sweep, eval, generate, replay.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rtkm

#endif  // RTKM_CLI_HPP
