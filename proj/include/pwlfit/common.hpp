#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace pwlfit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

// Comparison tolerances: two function values are "equal at a point" when
// they differ by less than eps_abs + eps_rel * max magnitude.
inline constexpr double kEpsAbs = 1e-12;
inline constexpr double kEpsRel = 1e-12;

// Interval pieces narrower than this (relative to the boundary scale)
// are suppressed during envelope splicing.
inline constexpr double kWidthRel = 1e-14;

inline bool values_tie(double u, double v) {
  return std::abs(u - v) <= kEpsAbs + kEpsRel * std::max(std::abs(u), std::abs(v));
}

inline double width_floor(double x0, double x1) {
  return kWidthRel * std::max({1.0, std::abs(x0), std::abs(x1)});
}

// 17 significant digits round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail
}  // namespace pwlfit
