#pragma once

// Command-line front end: preprocess, train, export.

#include <iosfwd>
#include <string>
#include <vector>

namespace dhypr {

inline constexpr int kOutputFormatVersion = 1;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// args excludes the program name. Failures are reported on `err` as a single
// JSON object {"error": kind, "message": ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dhypr
