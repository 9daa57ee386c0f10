// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "drforge/color.hpp"
#include "drforge/image.hpp"
#include "drforge/math.hpp"

namespace drforge {

// ---------------------------------------------------------------------------
// Tonemapping and transfer curves
// ---------------------------------------------------------------------------

// Per-channel x / (1 + x). Throws InvalidRadianceError on negative or
// non-finite input.
Rgb reinhard_tonemap(const Rgb& hdr);

// AgX display transform using the widely circulated polynomial fit of the
// default contrast curve. Output is display-encoded, in [0,1].
Rgb agx_tonemap(const Rgb& hdr);

double srgb_encode(double linear);
double srgb_decode(double encoded);
Rgb srgb_encode(const Rgb& linear);
Rgb srgb_decode(const Rgb& encoded);

// ---------------------------------------------------------------------------
// Equirectangular convention
//
// u in [0,1) runs left to right, v in [0,1] top to bottom. theta = pi * v is
// the polar angle from +Y and phi = 2 pi (u - 0.5) the azimuth, so the image
// center looks down -Z:
//   d = (sin(theta) sin(phi), cos(theta), -sin(theta) cos(phi))
// ---------------------------------------------------------------------------

Vec3 equirect_to_direction(double u, double v);
Vec2 direction_to_equirect(const Vec3& d);
// Direction through the center of texel (x, y) of a width x height map.
Vec3 texel_direction(int x, int y, int width, int height);
// Exact solid angle subtended by any texel of row y.
double texel_solid_angle(int y, int width, int height);

// HDR equirectangular radiance map. Immutable after construction; the
// radiance at a texel is the stored value times intensity_scale.
class EnvironmentMap {
 public:
  EnvironmentMap() = default;
  // Validates the 2:1 aspect and that all values are finite and >= 0.
  explicit EnvironmentMap(Image pixels, double intensity_scale = 1.0);

  static EnvironmentMap uniform(int width, int height, const Rgb& radiance);

  int width() const { return pixels_.width; }
  int height() const { return pixels_.height; }
  double intensity_scale() const { return intensity_scale_; }
  const Image& pixels() const { return pixels_; }
  bool empty() const { return pixels_.empty(); }

  Rgb texel(int x, int y) const { return pixels_.rgb(x, y) * intensity_scale_; }

  friend bool operator==(const EnvironmentMap&, const EnvironmentMap&) = default;

 private:
  Image pixels_;
  double intensity_scale_ = 1.0;
};

EnvironmentMap load_environment(const std::filesystem::path& path);
void save_environment(const std::filesystem::path& path, const EnvironmentMap& env);

// Bilinear lookup with horizontal wrap and pole clamping, times the intensity
// scale. `dir` must be unit length within 1e-4 (DomainError otherwise).
Rgb sample_env(const EnvironmentMap& env, const Vec3& dir);

// Rotates the map about +Y by `yaw` (a circular shift of yaw / 2pi * width
// columns, bilinear for fractional shifts), optionally mirrors it
// horizontally, then multiplies all values by `scale`.
EnvironmentMap augment_env(const EnvironmentMap& env, double yaw, bool flip, double scale);

// ---------------------------------------------------------------------------
// Lighting encodings
// ---------------------------------------------------------------------------

struct LogEncoding {
  Image image;         // log(x + 1) / e_max per channel, in [0,1]
  double e_max = 0.0;  // max log(x + 1) over the map, floored at kLogEncodingFloor
};

inline constexpr double kLogEncodingFloor = 1e-6;

LogEncoding log_encode(const EnvironmentMap& env);
// Inverse of log_encode given the stored e_max.
EnvironmentMap log_decode(const Image& encoded, double e_max);

// Per-texel unit direction expressed in the camera frame: the world direction
// of each texel center rotated by `world_to_camera`.
Image direction_encoding(int width, int height, const Mat3& world_to_camera);

struct LightingEncoding {
  Image e_ldr;  // Reinhard-tonemapped radiance, linear, in [0,1)
  Image e_log;
  Image e_dir;
  double e_max = 0.0;
};

LightingEncoding encode_lighting(const EnvironmentMap& env, const Mat3& world_to_camera);

}  // namespace drforge
