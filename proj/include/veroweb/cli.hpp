#pragma once

#include <string>
#include <vector>

namespace veroweb {

/// Batch front-end. Exit codes: 0 all checks within tolerance, 1 a check
/// failed, 2 invalid input. `args` excludes the program name.
int cli_run(const std::vector<std::string>& args);

}  // namespace veroweb
