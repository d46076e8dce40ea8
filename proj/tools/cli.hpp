#ifndef RICCATI_HJB_TOOLS_CLI_HPP
#define RICCATI_HJB_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace riccati::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kInputError = 2,
    kSolverError = 3,
    kCheckFailed = 4,
    kOutputError = 5,
};

/// Runs one command line (args[0] is the program name). Messages go to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riccati::cli

#endif
