#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace causabs {

// Exit codes: 0 success or ID, 1 usage or validation, 2 inconclusive fit, 3 not identifiable.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace causabs
