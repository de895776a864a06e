#pragma once

#include <iosfwd>

namespace requ::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kBadArguments = 2, kIoError = 3 };

/// Entry point of the `requ` tool: verify, invert, complexity, pde.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace requ::cli
