#pragma once

#include <ostream>

namespace errortree {

/// Entry point of the `errortree` tool. Returns the process exit code:
/// 0 success, 1 internal error, 2 bad input, 3 capability or mode mismatch,
/// 4 index/oracle divergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace errortree
