#pragma once

#include <string>
#include <vector>

namespace ocsp {

// Runs one CLI invocation. Exit codes: 0 success, 1 usage or input error,
// 2 a verified property failed.
int cli_run(int argc, char** argv);
int cli_run(const std::vector<std::string>& args);

}  // namespace ocsp
