#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wellpose {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitIo = 3 };

/// Runs the command line in-process. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wellpose
