#pragma once

#include <iosfwd>

namespace wkappa {

// Subcommands analyze, curve, plan and simulate. Returns the process exit
// status: 0 success, 1 computation error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wkappa
