#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace planettt::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;  // verification or validation failed
inline constexpr int kUsage = 2;

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace planettt::cli
