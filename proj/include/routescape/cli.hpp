#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace routescape::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime = 1;
inline constexpr int exit_validation = 2;

/// Entry point of the `routescape` tool. `args` excludes the program name.
/// Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace routescape::cli
