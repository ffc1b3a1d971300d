#pragma once

#include "lever/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lever::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;     // verify: pass fraction below --min-pass
inline constexpr int kExitMalformedInput = 2;  // unreadable/invalid file or data
inline constexpr int kExitDimensionMismatch = 3;
inline constexpr int kExitRankCollapse = 4;
inline constexpr int kExitInvalidFlag = 5;

int exit_code_for(ErrorCode code);

/// Runs the command line `args` (without the program name). Results go to
/// `out`; errors are written to `err` as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lever::cli
