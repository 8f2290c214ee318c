#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cornn::csv {

/// Shortest form that still round-trips: printf "%.17g".
std::string format_double(double v);

/// Fewest digits (15, 16 or 17) that parse back to the same double.
std::string format_shortest(double v);

/// Full-string parse; nullopt on any trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);
std::optional<unsigned long long> parse_uint(std::string_view text);

/// Splits a line on commas. No quoting: the suite never writes fields that
/// contain commas.
std::vector<std::string_view> split(std::string_view line);

/// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

} // namespace cornn::csv
