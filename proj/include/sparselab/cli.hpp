#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace sparselab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand; `args` excludes the program name. Returns 0 when every
/// hard assertion passes, 1 on an assertion failure, 2 on a usage or config error.
[[nodiscard]] int runSubcommand(const std::vector<std::string>& args, std::ostream& out = std::cout,
                                std::ostream& err = std::cerr);

}  // namespace sparselab
