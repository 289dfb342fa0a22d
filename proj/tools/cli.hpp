#pragma once

#include <ostream>

namespace sgsr::cli {

/// Entry point of the sgsr command. Returns the process exit code; errors
/// print a single "error: ..." line to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgsr::cli
