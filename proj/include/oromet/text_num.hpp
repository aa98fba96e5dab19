#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "oromet/error.hpp"

namespace oromet {

/// Shortest decimal form that parses back to the identical double, so file
/// round-trips are bit-exact and output bytes are stable across runs.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ParseError(what + ": not a number: '" + std::string(text) + "'");
  return value;
}

inline long long parse_integer(std::string_view text, const std::string& what) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ParseError(what + ": not an integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace oromet
