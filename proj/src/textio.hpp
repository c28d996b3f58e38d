#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "stsa/errors.hpp"

// Locale-independent, deterministic text formatting shared by the CSV and
// symbol-file writers. Doubles are printed with the shortest representation
// that parses back to the identical bit pattern.
namespace stsa::detail {

inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_int(long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Parse a full token as a double; leading/trailing spaces and tabs are
// tolerated, anything else is an error.
inline bool parse_double(std::string_view token, double& out) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && (token[begin] == ' ' || token[begin] == '\t')) ++begin;
  while (end > begin && (token[end - 1] == ' ' || token[end - 1] == '\t')) --end;
  if (begin == end) return false;
  const char* first = token.data() + begin;
  const char* last = token.data() + end;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

// RFC 4180 field quoting: quote when the field contains a comma, a quote,
// or a line break; embedded quotes are doubled.
inline std::string csv_field(std::string_view s) {
  bool needs_quote = false;
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quote = true;
      break;
    }
  }
  if (!needs_quote) return std::string(s);
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace stsa::detail
