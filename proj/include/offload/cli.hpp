#pragma once

#include <vector>
#include <string>

namespace offload {

// Entry point behind the `offload` binary. Exit codes: 0 success,
// 2 configuration/validation error, 3 simulation error, 1 anything else.
int cli_main(const std::vector<std::string>& args);

}  // namespace offload
