#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fkdv::cli {

enum ExitCode : int { kOk = 0, kVerdictFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Parses and runs one subcommand; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fkdv::cli
