#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liouville::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,         // bad flags or parameters outside the domain
  kPrecision = 2,     // quadrature refinement disagreement
  kNewton = 3,        // Newton failure, partial branch saved
  kPrecondition = 4,  // restricted kernel not one-dimensional
  kMismatch = 5,      // signs, zero counts, masses or plane checks disagree
  kIo = 6,            // unreadable or unwritable file, malformed branch file
};

// Runs the tool on args (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liouville::cli
