#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtheta::cli {

// Exit codes: 0 success, 1 mathematical failure (report still written), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtheta::cli
