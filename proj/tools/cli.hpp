#pragma once

#include <ostream>

namespace modefisher::cli {

/// Runs the command-line interface. Returns 0 on success, 2 on usage errors
/// and 1 when a computation fails; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modefisher::cli
