#pragma once

#include <iosfwd>

namespace symh {

// Parses argv and dispatches to the library. Writes results to `out` and
// diagnostics to `err`. Returns 0 on success, 1 on a domain error reported
// by the library, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symh
