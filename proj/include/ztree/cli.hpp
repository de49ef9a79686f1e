#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ztree {

inline constexpr std::string_view kToolVersion = "ztree 1.0.0";

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on a usage error and 1 on a data or model error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Command line recorded in artifact headers: the arguments joined by
/// spaces, without --threads, which never changes an artifact.
std::string recorded_command(const std::vector<std::string>& args);

}  // namespace ztree
