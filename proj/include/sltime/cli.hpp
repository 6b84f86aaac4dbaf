#pragma once

#include <iosfwd>

namespace sltime {

inline constexpr const char* kVersion = "1.0.0";

/// Command-line entry point. Exit codes: 0 success, 2 usage, 3 validation, 4 numeric.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sltime
