#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swag {

// Splits on `sep` without collapsing empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

// Blank lines and lines whose first non-space character is '#'.
bool is_skippable(std::string_view line);

// Locale-independent full-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

// Shortest representation that round-trips exactly.
std::string format_double(double v);

// Comma-joined shortest representations.
std::string format_vector(const double* data, std::size_t n);
std::optional<std::vector<double>> parse_vector(std::string_view s);

// 64-bit FNV-1a, rendered as 16 hex digits by `hex64`.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace swag
