// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/env_sampler.hpp"

#include <algorithm>

namespace drforge {

namespace {

// Index of the bin of `cdf` containing u and the position of u inside it.
int search(const double* cdf, int n, double u, double& frac) {
  const double* it = std::upper_bound(cdf, cdf + n + 1, u);
  int i = std::clamp(static_cast<int>(it - cdf) - 1, 0, n - 1);
  double width = cdf[i + 1] - cdf[i];
  frac = width > 0 ? std::clamp((u - cdf[i]) / width, 0.0, 1.0 - 1e-12) : 0.5;
  return i;
}

Vec3 uniform_sphere(const Vec2& u) {
  double z = 1.0 - 2.0 * u.x;
  double r = safe_sqrt(1.0 - z * z);
  double phi = kTwoPi * u.y;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

EnvSampler::EnvSampler(const EnvironmentMap& env) : width_(env.width()), height_(env.height()) {
  const int w = width_, h = height_;
  conditional_cdf_.assign(static_cast<std::size_t>(h) * (w + 1), 0.0);
  marginal_cdf_.assign(h + 1, 0.0);
  row_mass_.assign(h, 0.0);
  for (int y = 0; y < h; ++y) {
    const double solid_angle = texel_solid_angle(y, w, h);
    double* row = &conditional_cdf_[static_cast<std::size_t>(y) * (w + 1)];
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + luminance(env.texel(x, y)) * solid_angle;
    row_mass_[y] = row[w];
    if (row[w] > 0)
      for (int x = 1; x <= w; ++x) row[x] /= row[w];
    marginal_cdf_[y + 1] = marginal_cdf_[y] + row_mass_[y];
  }
  total_ = marginal_cdf_[h];
  fallback_ = !(total_ > 0);
  if (!fallback_)
    for (int y = 1; y <= h; ++y) marginal_cdf_[y] /= total_;
}

double EnvSampler::texel_probability(int x, int y) const {
  if (fallback_) return texel_solid_angle(y, width_, height_) / (4.0 * kPi);
  const double* row = &conditional_cdf_[static_cast<std::size_t>(y) * (width_ + 1)];
  return (marginal_cdf_[y + 1] - marginal_cdf_[y]) * (row[x + 1] - row[x]);
}

EnvSampler::Sample EnvSampler::sample(const Vec2& u) const {
  if (fallback_) return {uniform_sphere(u), 1.0 / (4.0 * kPi)};
  double fy, fx;
  int y = search(marginal_cdf_.data(), height_, u.y, fy);
  int x = search(&conditional_cdf_[static_cast<std::size_t>(y) * (width_ + 1)], width_, u.x, fx);
  // Uniform in solid angle inside the texel: linear in phi and in cos(theta).
  const double cos0 = std::cos(kPi * y / height_), cos1 = std::cos(kPi * (y + 1) / height_);
  const double theta = safe_acos(cos0 + (cos1 - cos0) * fy);
  const double vv = std::clamp(theta / kPi, static_cast<double>(y) / height_, (y + 1 - 1e-9) / height_);
  const double uu = (x + fx) / width_;
  return {equirect_to_direction(uu, vv), texel_probability(x, y) / texel_solid_angle(y, width_, height_)};
}

double EnvSampler::pdf(const Vec3& d) const {
  if (fallback_) return 1.0 / (4.0 * kPi);
  Vec2 uv = direction_to_equirect(d);
  int x = std::clamp(static_cast<int>(uv.x * width_), 0, width_ - 1);
  int y = std::clamp(static_cast<int>(uv.y * height_), 0, height_ - 1);
  return texel_probability(x, y) / texel_solid_angle(y, width_, height_);
}

}  // namespace drforge
