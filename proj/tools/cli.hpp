// Command-line front end. Kept as a library so tests can drive it in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cissnv::cli {

enum ExitCode : int { Success = 0, RuntimeError = 1, ValidationError = 2 };

/// args excludes the program name. Tables go to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cissnv::cli
