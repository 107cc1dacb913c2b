#pragma once

#include <iosfwd>

namespace wfwl::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,     ///< usage, missing file, parse or format error
  kUnsatisfiable = 3,  ///< query rejected by the dictionary check
  kQueryError = 4,
};

/// Runs the command line `argv`, writing results to `out` and diagnostics
/// and key=value metrics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wfwl::cli
