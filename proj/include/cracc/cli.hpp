#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cracc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;      ///< malformed CSV
inline constexpr int kExitEstimator = 3;     ///< NoCases, SingularFit, ...
inline constexpr int kExitConfig = 4;        ///< bad flags or config file

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace cracc
