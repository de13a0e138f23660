#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace srml::detail {

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

inline std::string_view trim_view(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

inline bool is_blank(std::string_view s) noexcept { return trim_view(s).empty(); }

// Collapses internal whitespace runs to one space and trims the ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Strips an optional `prefix:` from a qualified name.
inline std::string_view local_name(std::string_view qname) noexcept {
  auto colon = qname.rfind(':');
  return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

// Accepts `[+-]? (digits ('.' digits?)? | '.' digits)` after trimming.
inline bool is_decimal_literal(std::string_view s) noexcept {
  s = trim_view(s);
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  std::size_t i = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++frac_digits;
  }
  return i == s.size() && int_digits + frac_digits > 0;
}

inline std::optional<double> parse_decimal(std::string_view s) noexcept {
  if (!is_decimal_literal(s)) return std::nullopt;
  s = trim_view(s);
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Shortest round-trip fixed notation; integral values print without a point.
// With `keep_point`, integral values print with one decimal ("1125.0").
inline std::string format_number(double value, bool keep_point = false) {
  if (value == 0.0) value = 0.0;  // folds -0
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  std::string out = ec == std::errc() ? std::string(buf, ptr) : std::to_string(value);
  if (keep_point && out.find('.') == std::string::npos) out += ".0";
  return out;
}

}  // namespace srml::detail
