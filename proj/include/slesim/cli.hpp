#pragma once

#include <string>
#include <vector>

namespace sle {

// Entry point behind the slesim binary; exposed so tests can drive the CLI
// in-process. Exit codes: 0 success, 2 config error, 3 runtime error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace sle
