#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace routescape::text {

/// Shortest decimal form that parses back to the same double; '.' separator
/// regardless of locale.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view token);
std::optional<std::uint64_t> parse_uint(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);

}  // namespace routescape::text
