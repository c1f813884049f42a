#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conic {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitUsage = 64 };

/// Runs one subcommand: exponents, kernel-verify, simulate, norm, sweep, decay, holder.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace conic
