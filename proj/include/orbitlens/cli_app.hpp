#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitlens {

// Command-line front end: subcommands sweep, classify, order, abel, saddle,
// orbit-dump. Exit codes: 0 ok, 1 usage/parse, 2 numeric precondition,
// 3 internal. ORBITLENS_THREADS caps sweep parallelism; --config loads a
// flat JSON of defaults, explicit flags win.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitlens
