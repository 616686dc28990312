#pragma once

#include <string>
#include <vector>

namespace reluforge {

// exit codes: 0 success, 1 verification failure, 2 usage, 3 I/O
int run_cli(const std::vector<std::string>& args);

} // namespace reluforge
