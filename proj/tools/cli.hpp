#pragma once

#include <iosfwd>

namespace distwave::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigInvalid = 2,
  kInfeasible = 3,  // infeasible schedule, framing or missing messages
  kIo = 4,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace distwave::cli
