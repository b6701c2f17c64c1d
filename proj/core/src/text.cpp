#include "swag/text.hpp"

#include <charconv>
#include <cstdio>

namespace swag {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

bool is_skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

template <typename T>
static std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view s) { return parse_number<double>(s); }
std::optional<std::int64_t> parse_int(std::string_view s) { return parse_number<std::int64_t>(s); }
std::optional<std::uint64_t> parse_uint(std::string_view s) {
  return parse_number<std::uint64_t>(s);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_vector(const double* data, std::size_t n) {
  std::string out;
  out.reserve(n * 20);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out.push_back(',');
    out += format_double(data[i]);
  }
  return out;
}

std::optional<std::vector<double>> parse_vector(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto field : split(s, ',')) {
    const auto v = parse_double(field);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace swag
