// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/radiometry.hpp"

#include <cmath>
#include <string>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"

namespace drforge {

namespace {

bool valid_radiance(double v) { return std::isfinite(v) && v >= 0.0; }

// Snaps interpolation weights that are within rounding noise of a texel
// center so lookups at centers return the stored value exactly.
constexpr double kCenterSnap = 1e-9;

void split_coordinate(double t, int& base, double& frac) {
  double fl = std::floor(t);
  frac = t - fl;
  base = static_cast<int>(fl);
  if (frac < kCenterSnap) {
    frac = 0.0;
  } else if (frac > 1.0 - kCenterSnap) {
    frac = 0.0;
    base += 1;
  }
}

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Rgb reinhard_tonemap(const Rgb& hdr) {
  for (int c = 0; c < 3; ++c)
    if (!valid_radiance(hdr[c]))
      throw InvalidRadianceError("reinhard_tonemap: radiance must be finite and >= 0");
  return {hdr.r / (1.0 + hdr.r), hdr.g / (1.0 + hdr.g), hdr.b / (1.0 + hdr.b)};
}

Rgb agx_tonemap(const Rgb& hdr) {
  static const Mat3 inset{{0.842479062253094, 0.0423282422610123, 0.0423756549057051},
                          {0.0784335999999992, 0.878468636469772, 0.0784336},
                          {0.0792237451477643, 0.0791661274605434, 0.879142973793104}};
  static const Mat3 outset{{1.19687900512017, -0.0528968517574562, -0.0529716355144438},
                           {-0.0980208811401368, 1.15190312990417, -0.0980434501171241},
                           {-0.0990297440797205, -0.0989611768448433, 1.15107367264116}};
  constexpr double min_ev = -12.47393;
  constexpr double max_ev = 4.026069;

  Vec3 v = inset * Vec3{std::max(hdr.r, 1e-10), std::max(hdr.g, 1e-10), std::max(hdr.b, 1e-10)};
  for (int c = 0; c < 3; ++c) {
    double x = std::clamp(std::log2(std::max(v[c], 1e-10)), min_ev, max_ev);
    x = (x - min_ev) / (max_ev - min_ev);
    double x2 = x * x, x4 = x2 * x2;
    v[c] = 15.5 * x4 * x2 - 40.14 * x4 * x + 31.96 * x4 - 6.868 * x2 * x + 0.4298 * x2 +
           0.1191 * x - 0.00232;
  }
  v = outset * v;
  return clamp01({v.x, v.y, v.z});
}

double srgb_encode(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x <= 0.04045 ? x / 12.92 : std::pow((x + 0.055) / 1.055, 2.4);
}

Rgb srgb_encode(const Rgb& c) { return {srgb_encode(c.r), srgb_encode(c.g), srgb_encode(c.b)}; }
Rgb srgb_decode(const Rgb& c) { return {srgb_decode(c.r), srgb_decode(c.g), srgb_decode(c.b)}; }

Vec3 equirect_to_direction(double u, double v) {
  double theta = kPi * v;
  double phi = kTwoPi * (u - 0.5);
  double st = std::sin(theta);
  return {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)};
}

Vec2 direction_to_equirect(const Vec3& d) {
  double theta = std::atan2(std::sqrt(d.x * d.x + d.z * d.z), d.y);
  double phi = std::atan2(d.x, -d.z);
  double u = phi / kTwoPi + 0.5;
  if (u >= 1.0) u -= 1.0;
  if (u < 0.0) u += 1.0;
  return {u, theta / kPi};
}

Vec3 texel_direction(int x, int y, int width, int height) {
  return equirect_to_direction((x + 0.5) / width, (y + 0.5) / height);
}

double texel_solid_angle(int y, int width, int height) {
  double t0 = kPi * y / height;
  double t1 = kPi * (y + 1) / height;
  return kTwoPi / width * (std::cos(t0) - std::cos(t1));
}

EnvironmentMap::EnvironmentMap(Image pixels, double intensity_scale)
    : pixels_(std::move(pixels)), intensity_scale_(intensity_scale) {
  if (pixels_.channels != 3) throw DomainError("environment map must have 3 channels");
  if (pixels_.height <= 0 || pixels_.width != 2 * pixels_.height)
    throw DomainError("environment map must be equirectangular (width = 2 x height), got " +
                      std::to_string(pixels_.width) + "x" + std::to_string(pixels_.height));
  if (!(intensity_scale_ > 0.0) || !std::isfinite(intensity_scale_))
    throw DomainError("environment intensity scale must be finite and > 0");
  for (float v : pixels_.data)
    if (!valid_radiance(v))
      throw InvalidRadianceError("environment map contains negative or non-finite radiance");
}

EnvironmentMap EnvironmentMap::uniform(int width, int height, const Rgb& radiance) {
  Image img(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.set_rgb(x, y, radiance);
  return EnvironmentMap(std::move(img));
}

EnvironmentMap load_environment(const std::filesystem::path& path) {
  return EnvironmentMap(read_exr_rgb(path));
}

void save_environment(const std::filesystem::path& path, const EnvironmentMap& env) {
  Image img = env.pixels();
  if (env.intensity_scale() != 1.0)
    for (float& v : img.data) v = static_cast<float>(v * env.intensity_scale());
  write_exr_rgb(path, img);
}

Rgb sample_env(const EnvironmentMap& env, const Vec3& dir) {
  if (std::abs(length(dir) - 1.0) > 1e-4) throw DomainError("sample_env: direction is not unit length");
  const int w = env.width(), h = env.height();
  Vec2 uv = direction_to_equirect(dir);
  int x0, y0;
  double fx, fy;
  split_coordinate(uv.x * w - 0.5, x0, fx);
  split_coordinate(uv.y * h - 0.5, y0, fy);
  int y1 = std::clamp(y0 + 1, 0, h - 1);
  y0 = std::clamp(y0, 0, h - 1);
  int x1 = wrap(x0 + 1, w);
  x0 = wrap(x0, w);
  if (fx == 0.0 && fy == 0.0) return env.texel(x0, y0);
  Rgb top = env.texel(x0, y0) * (1 - fx) + env.texel(x1, y0) * fx;
  Rgb bottom = env.texel(x0, y1) * (1 - fx) + env.texel(x1, y1) * fx;
  return top * (1 - fy) + bottom * fy;
}

EnvironmentMap augment_env(const EnvironmentMap& env, double yaw, bool flip, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("augment_env: scale must be > 0");
  if (!std::isfinite(yaw)) throw DomainError("augment_env: yaw must be finite");
  const Image& src = env.pixels();
  const int w = src.width, h = src.height;
  const double shift = yaw / kTwoPi * w;
  Image out(w, h, 3);
  for (int x = 0; x < w; ++x) {
    int base;
    double frac;
    split_coordinate(x - shift, base, frac);
    const int s0 = wrap(base, w), s1 = wrap(base + 1, w);
    const int dst = flip ? w - 1 - x : x;
    for (int y = 0; y < h; ++y) {
      for (int c = 0; c < 3; ++c) {
        double v = frac == 0.0 ? src.at(s0, y, c) : (1 - frac) * src.at(s0, y, c) + frac * src.at(s1, y, c);
        if (scale != 1.0) v *= scale;
        out.at(dst, y, c) = static_cast<float>(v);
      }
    }
  }
  return EnvironmentMap(std::move(out), env.intensity_scale());
}

LogEncoding log_encode(const EnvironmentMap& env) {
  LogEncoding enc;
  enc.image = Image(env.width(), env.height(), 3);
  double e_max = 0.0;
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) {
      Rgb v = env.texel(x, y);
      for (int c = 0; c < 3; ++c) e_max = std::max(e_max, std::log1p(v[c]));
    }
  enc.e_max = std::max(e_max, kLogEncodingFloor);
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) {
      Rgb v = env.texel(x, y);
      for (int c = 0; c < 3; ++c) enc.image.at(x, y, c) = static_cast<float>(std::log1p(v[c]) / enc.e_max);
    }
  return enc;
}

EnvironmentMap log_decode(const Image& encoded, double e_max) {
  if (!(e_max > 0.0)) throw DomainError("log_decode: e_max must be > 0");
  Image out(encoded.width, encoded.height, 3);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<float>(std::max(0.0, std::expm1(encoded.data[i] * e_max)));
  return EnvironmentMap(std::move(out));
}

Image direction_encoding(int width, int height, const Mat3& world_to_camera) {
  if (height <= 0 || width != 2 * height)
    throw DomainError("direction_encoding: width must equal 2 x height");
  Image out(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Vec3 d = normalize(world_to_camera * texel_direction(x, y, width, height));
      out.set_rgb(x, y, {d.x, d.y, d.z});
    }
  return out;
}

LightingEncoding encode_lighting(const EnvironmentMap& env, const Mat3& world_to_camera) {
  LightingEncoding enc;
  enc.e_ldr = Image(env.width(), env.height(), 3);
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) enc.e_ldr.set_rgb(x, y, reinhard_tonemap(env.texel(x, y)));
  LogEncoding log = log_encode(env);
  enc.e_log = std::move(log.image);
  enc.e_max = log.e_max;
  enc.e_dir = direction_encoding(env.width(), env.height(), world_to_camera);
  return enc;
}

}  // namespace drforge
