#pragma once

// Internal string helpers shared by the parsers and writers.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace electmap::text {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) noexcept;

// Trims and collapses internal whitespace runs (including U+00A0) to one space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
// Case-insensitive ordering with a byte-wise tiebreak, so it is a total order.
bool iless(std::string_view a, std::string_view b) noexcept;

bool valid_utf8(std::string_view s) noexcept;
// Valid UTF-8 passes through; anything else is read as Latin-1.
std::string to_utf8(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s) noexcept;
std::optional<double> parse_double(std::string_view s) noexcept;

// Shortest text that parses back to the same double.
std::string format_double(double value);
// Fixed-point with `decimals` digits; "-0.000000" is normalized to "0.000000".
std::string format_fixed(double value, int decimals);

std::string xml_escape(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

} // namespace electmap::text
