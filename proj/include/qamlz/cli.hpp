#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qamlz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point for `qamlz <gen-data|train|sweep|show> ...`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qamlz::cli
