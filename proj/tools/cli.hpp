#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tenet::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericAbort = 3,
  kMissingArtifact = 4,
  kGateFailure = 5,
};

// Runs one command line (args excludes the program name) and returns its
// exit code. Library errors are reported on `err` and mapped to codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tenet::cli
