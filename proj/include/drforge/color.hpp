// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

namespace drforge {

// Linear RGB triple: radiance (>= 0, unbounded) or reflectance (in [0,1]).
struct Rgb {
  double r = 0, g = 0, b = 0;

  constexpr Rgb() = default;
  constexpr Rgb(double r, double g, double b) : r(r), g(g), b(b) {}
  constexpr explicit Rgb(double v) : r(v), g(v), b(v) {}

  constexpr double operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }
  constexpr double& operator[](int i) { return i == 0 ? r : (i == 1 ? g : b); }

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

constexpr Rgb operator+(const Rgb& a, const Rgb& b) { return {a.r + b.r, a.g + b.g, a.b + b.b}; }
constexpr Rgb operator-(const Rgb& a, const Rgb& b) { return {a.r - b.r, a.g - b.g, a.b - b.b}; }
constexpr Rgb operator*(const Rgb& a, const Rgb& b) { return {a.r * b.r, a.g * b.g, a.b * b.b}; }
constexpr Rgb operator/(const Rgb& a, const Rgb& b) { return {a.r / b.r, a.g / b.g, a.b / b.b}; }
constexpr Rgb operator*(const Rgb& a, double s) { return {a.r * s, a.g * s, a.b * s}; }
constexpr Rgb operator*(double s, const Rgb& a) { return a * s; }
constexpr Rgb operator/(const Rgb& a, double s) { return {a.r / s, a.g / s, a.b / s}; }
constexpr Rgb& operator+=(Rgb& a, const Rgb& b) { return a = a + b; }
constexpr Rgb& operator*=(Rgb& a, const Rgb& b) { return a = a * b; }
constexpr Rgb& operator*=(Rgb& a, double s) { return a = a * s; }

inline double max_component(const Rgb& c) { return std::max({c.r, c.g, c.b}); }
inline double mean(const Rgb& c) { return (c.r + c.g + c.b) / 3.0; }
// Rec. 709 luminance.
inline double luminance(const Rgb& c) { return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b; }
inline bool is_black(const Rgb& c) { return c.r == 0 && c.g == 0 && c.b == 0; }
inline bool is_finite(const Rgb& c) {
  return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b);
}
inline Rgb lerp(const Rgb& a, const Rgb& b, double t) { return a * (1 - t) + b * t; }
inline Rgb clamp01(const Rgb& c) {
  return {std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0), std::clamp(c.b, 0.0, 1.0)};
}

}  // namespace drforge
