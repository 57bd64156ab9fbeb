#pragma once

// Shortest-round-trip decimal formatting, so numbers written to reports and
// files parse back to the identical double.

#include <charconv>
#include <concepts>
#include <string>

namespace syhd {

inline std::string to_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <std::integral T>
std::string to_shortest(T v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace syhd
