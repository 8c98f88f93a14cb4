#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shadowlab {

/// Exit codes: 0 success (including certified negative replications),
/// 1 certified failure (a hypothesis or bound does not hold), 2 errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shadowlab
