#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace henon::cli {

enum ExitCode : int { ok = 0, failed = 1, domain_error = 2, numerical_error = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace henon::cli
