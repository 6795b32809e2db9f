#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace epiwelfare {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

/// 12 significant digits, used for CSV exports.
std::string format_csv(double v);

/// Strict full-string parse; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace epiwelfare
