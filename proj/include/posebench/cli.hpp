#pragma once

#include <iosfwd>

namespace posebench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

/// Entry point of the `posebench` tool. Returns the process exit code:
/// 0 success, 1 validation failure, 2 internal invariant violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace posebench
