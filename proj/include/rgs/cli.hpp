#pragma once

#include <string>
#include <vector>

namespace rgs::cli {

// Runs one CLI invocation (the argv tail, without the program name) and
// returns the process exit code: 0 ok, 2 usage, 3 data, 4 numeric.
// Factored out of main() so tests can drive full pipelines in-process.
int run(const std::vector<std::string>& args);

} // namespace rgs::cli
