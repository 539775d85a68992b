#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unitfree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Runs one `unitfree` command. args excludes the program name.
/// Returns 0 if every check passes, 1 on a verification or integration
/// failure, 2 on bad input (unreadable file, parse error, bad flags).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unitfree::cli
