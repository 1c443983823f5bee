#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualsrc {

/// Command-line entry point. args[0] is the program name. Returns the
/// process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualsrc
