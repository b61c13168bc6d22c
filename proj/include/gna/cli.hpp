#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gna {

// Runs one subcommand. args excludes the program name. Returns 0 on success,
// 1 on a usage error and 2 on a data or runtime error; messages go to err.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

std::string usage_text();

}  // namespace gna
