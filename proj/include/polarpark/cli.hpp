#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polarpark {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitCheckFailed = 2 };

/// Entry point of the polarpark tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polarpark
