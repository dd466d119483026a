#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chiral::cli {

/// Exit codes: 0 success, 1 usage error, 2 validation or admissibility failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chiral::cli
