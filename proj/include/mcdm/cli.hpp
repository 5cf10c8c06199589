#pragma once

#include <iosfwd>

namespace mcdm {

/// Entry point of the `mcdm` command-line tool. Returns the process exit
/// code: 0 success, 1 usage or validation error, 2 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcdm
