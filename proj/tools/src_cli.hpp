// Batch front end: solve, sweep, verify, simulate.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace repcontract::cli {

enum ExitCode : int { kOk = 0, kCertFail = 1, kUsage = 2, kStrict = 3, kIo = 4 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repcontract::cli
