#pragma once

#include "umlab/config.hpp"

#include <string>
#include <vector>

namespace umlab {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one subcommand (simulate | solve | dual | counterexample |
/// sweep | ui-diag) with the given command-line arguments (program name
/// excluded).  Writes <out>/<subcommand>.csv and <out>/manifest.txt;
/// returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace umlab
