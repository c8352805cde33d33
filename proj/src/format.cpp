#include "odefilter/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace odefilter {
namespace {

std::string non_finite(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  return value > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    return non_finite(value);
  }
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_shortest(double value) {
  if (!std::isfinite(value)) {
    return non_finite(value);
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace odefilter
