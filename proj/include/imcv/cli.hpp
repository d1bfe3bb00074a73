#pragma once

#include <iosfwd>

namespace imcv {

enum ExitCode : int { exit_ok = 0, exit_fail = 1, exit_usage = 2 };

/// Run the imcverify command line. Subcommands: abstract, check, vertices,
/// simulate, complete.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace imcv
