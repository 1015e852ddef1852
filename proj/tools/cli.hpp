#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "psl2/error.hpp"

namespace psl2::cli {

// Exit codes: 0 success, 2 parse or invalid input, 3 ambiguous region, 4 class failure, 5 tracking or
// certification failure.
int exit_code(Fault f);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psl2::cli
