#pragma once

#include <iosfwd>

namespace shiftscope::cli {

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,          // I/O, parse, schema or data precondition failure
  kExitUsage = 2,          // bad flags, or not enough items to honor them
  kExitShiftDetected = 3,  // the test rejected "no shift"
};

/// Runs the command line; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shiftscope::cli
