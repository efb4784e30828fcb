#ifndef PANELCAST_TOOLS_CLI_HPP_
#define PANELCAST_TOOLS_CLI_HPP_

#include <iosfwd>

namespace panelcast::cli {

enum ExitCode : int {
  kOk = 0,
  kDataFailure = 1,
  kBadArguments = 2,
  kIoFailure = 3,
};

/// Entry point behind the `panelcast` binary. Results go to files or `out`;
/// progress and diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace panelcast::cli

#endif  // PANELCAST_TOOLS_CLI_HPP_
