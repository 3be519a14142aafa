#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cbandit {

// Exit codes: 0 ok, 2 usage, 3 model or structural error, 4 infeasible oracle.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbandit
