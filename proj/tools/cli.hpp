#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mkkc::cli {

/// Exit statuses shared by all subcommands.
enum ExitCode : int {
  kOk = 0,
  kRunFailed = 1,   // bench cells errored, or an unexpected failure
  kBadInput = 2,    // usage, malformed files, dimension mismatch
  kDegenerate = 3,  // solver degeneracy
};

/// Runs `mkkc <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mkkc::cli
