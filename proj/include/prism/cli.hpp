#pragma once

#include <ostream>

namespace prism {

/// Entry point of the `prism` tool: check, run, analyze, fmt.
/// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prism
