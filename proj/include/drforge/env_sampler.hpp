// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "drforge/math.hpp"
#include "drforge/radiometry.hpp"

namespace drforge {

// Piecewise-constant importance distribution over the texels of an
// environment map: texel probability proportional to luminance times the
// sine of its center polar angle. Directions are uniform in (u, v) within the
// chosen texel, so the solid-angle density is p W H / (2 pi^2 sin(theta)).
// An all-black map falls back to uniform sphere sampling.
class EnvSampler {
 public:
  EnvSampler() = default;
  explicit EnvSampler(const EnvironmentMap& env);

  struct Sample {
    Vec3 direction;
    double pdf = 0;  // 1/sr
  };

  Sample sample(const Vec2& u) const;
  double pdf(const Vec3& direction) const;
  // Discrete probability of texel (x, y).
  double texel_probability(int x, int y) const;

  bool is_uniform_fallback() const { return fallback_; }
  int width() const { return width_; }
  int height() const { return height_; }

 private:
  int width_ = 0;
  int height_ = 0;
  bool fallback_ = true;
  std::vector<double> marginal_cdf_;     // height + 1 entries
  std::vector<double> conditional_cdf_;  // height rows of width + 1 entries
  std::vector<double> row_mass_;         // unnormalized row sums
  double total_ = 0;
};

}  // namespace drforge
