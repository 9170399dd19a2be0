#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dspec::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInvalid = 2, kNumerical = 3 };

// Runs one subcommand; results go to `out` unless --out is given, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace dspec::cli
