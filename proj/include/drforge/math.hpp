// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace drforge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInvPi = std::numbers::inv_pi;

inline double radians(double deg) { return deg * kPi / 180.0; }
inline double degrees(double rad) { return rad * 180.0 / kPi; }

template <typename T>
constexpr T sqr(T x) {
  return x * x;
}

inline double safe_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }
inline double safe_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

struct Vec2 {
  double x = 0, y = 0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr Vec3 operator*(double s, const Vec3& a) { return a * s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
constexpr Vec3& operator+=(Vec3& a, const Vec3& b) { return a = a + b; }
constexpr Vec3& operator-=(Vec3& a, const Vec3& b) { return a = a - b; }
constexpr Vec3& operator*=(Vec3& a, double s) { return a = a * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double length_squared(const Vec3& a) { return dot(a, a); }
inline Vec3 normalize(const Vec3& a) {
  double l = length(a);
  return l > 0 ? a / l : Vec3{};
}
inline Vec3 min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline double max_component(const Vec3& a) { return std::max({a.x, a.y, a.z}); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}
inline bool is_unit(const Vec3& a, double tol) { return std::abs(length(a) - 1.0) <= tol; }

// Mirror `v` about `n`; both point away from the surface.
inline Vec3 reflect(const Vec3& v, const Vec3& n) { return 2.0 * dot(v, n) * n - v; }

// Column-major 3x3 matrix: x, y, z are the images of the basis vectors.
struct Mat3 {
  Vec3 x{1, 0, 0}, y{0, 1, 0}, z{0, 0, 1};

  static constexpr Mat3 identity() { return {}; }
  friend bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Vec3 operator*(const Mat3& m, const Vec3& v) { return m.x * v.x + m.y * v.y + m.z * v.z; }
constexpr Mat3 operator*(const Mat3& a, const Mat3& b) { return {a * b.x, a * b.y, a * b.z}; }
constexpr Mat3 transpose(const Mat3& m) {
  return {{m.x.x, m.y.x, m.z.x}, {m.x.y, m.y.y, m.z.y}, {m.x.z, m.y.z, m.z.z}};
}

inline Mat3 rotation_y(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {{c, 0, -s}, {0, 1, 0}, {s, 0, c}};
}
inline Mat3 rotation_x(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {{1, 0, 0}, {0, c, s}, {0, -s, c}};
}

inline bool is_orthonormal(const Mat3& m, double tol) {
  return is_unit(m.x, tol) && is_unit(m.y, tol) && is_unit(m.z, tol) &&
         std::abs(dot(m.x, m.y)) <= tol && std::abs(dot(m.y, m.z)) <= tol &&
         std::abs(dot(m.z, m.x)) <= tol;
}

// Camera-to-world rotation for a camera at `from` looking at `to`: the camera
// looks down its local -Z with +Y up.
inline Mat3 look_at_rotation(const Vec3& from, const Vec3& to, const Vec3& up = {0, 1, 0}) {
  Vec3 forward = normalize(to - from);
  Vec3 right = normalize(cross(forward, up));
  Vec3 true_up = cross(right, forward);
  return {right, true_up, -forward};
}

// Orthonormal basis around a unit normal (Duff et al. 2017).
struct Frame {
  Vec3 s, t, n;

  static Frame from_normal(const Vec3& n) {
    double sign = std::copysign(1.0, n.z);
    double a = -1.0 / (sign + n.z);
    double b = n.x * n.y * a;
    return {{1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x}, {b, sign + n.y * n.y * a, -n.y}, n};
  }
  Vec3 to_local(const Vec3& v) const { return {dot(v, s), dot(v, t), dot(v, n)}; }
  Vec3 from_local(const Vec3& v) const { return s * v.x + t * v.y + n * v.z; }
};

// Rigid transform with uniform scale: p' = rotation * (scale * p) + translation.
struct Transform {
  Vec3 translation{};
  Mat3 rotation{};
  double scale = 1.0;

  Vec3 apply_point(const Vec3& p) const { return rotation * (p * scale) + translation; }
  Vec3 apply_normal(const Vec3& n) const { return normalize(rotation * n); }

  friend bool operator==(const Transform&, const Transform&) = default;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;
  double tmin = 0.0;
  double tmax = INFINITY;

  Vec3 at(double t) const { return origin + direction * t; }
};

}  // namespace drforge
