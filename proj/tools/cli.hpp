#pragma once

#include "resispike/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace resispike::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,          // completed, null not rejected
  kExitReject = 2,      // test rejected the null
  kExitUsage = 64,      // bad command line or malformed input file
  kExitData = 65,       // input parsed but unusable (no spike, shape mismatch, ...)
  kExitNoInput = 66,    // input file missing
  kExitSoftware = 70,   // unexpected internal failure
  kExitConfig = 78,     // invalid configuration file
};

int exit_code_for(ErrorCode code) noexcept;

// Entry point shared by the binary and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resispike::cli
