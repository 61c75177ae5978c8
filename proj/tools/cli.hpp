#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsebound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMath = 3;
inline constexpr int kExitIo = 4;

/// Runs the sparsebound command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsebound::cli
