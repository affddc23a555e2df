#pragma once

#include <iosfwd>

namespace hmmc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kValidation = 3;
inline constexpr int kCapacity = 4;

// Runs one command line. Results go to `out` unless --out names a file;
// diagnostics go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmmc::cli
