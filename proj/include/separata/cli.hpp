#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace separata {

enum ExitCode : int { kExitProved = 0, kExitRefuted = 10, kExitUnknown = 20, kExitUsage = 2 };

/// The built-in benchmark: (row, formula text) in row order.
const std::vector<std::pair<int, std::string>>& table2_suite();

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace separata
