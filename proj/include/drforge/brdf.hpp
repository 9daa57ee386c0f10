// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "drforge/color.hpp"
#include "drforge/math.hpp"
#include "drforge/rng.hpp"
#include "drforge/scene.hpp"

namespace drforge {

// Metallic-roughness reflectance model.
//
//   specular: GGX distribution with alpha = max(r, 0.01)^2, height-correlated
//             Smith masking-shadowing and Schlick Fresnel with
//             F0 = lerp(0.04, a, m).
//   diffuse:  Lambert (1 - m) a / pi, scaled by the energy the specular lobe
//             leaves behind in both directions:
//               (1 - E(mu_o)) (1 - E(mu_i)) / (1 - E_avg)
//             where E(mu) = F0 A(mu, r) + B(mu, r) is the specular albedo from
//             the precomputed table below and E_avg its cosine-weighted mean.

inline constexpr double kMinRoughness = 0.01;
inline double ggx_alpha(double roughness) { return sqr(std::max(roughness, kMinRoughness)); }

// Directional albedo of the GGX lobe split into Fresnel scale and bias terms
// so that E = F0 * A + B, tabulated over (mu, r) in [0,1]^2.
class BrdfTable {
 public:
  static constexpr int kSize = 64;

  // The process-wide table, computed on first use.
  static const BrdfTable& instance();

  // Bilinear (A, B) at cosine `mu` and roughness `r`.
  Vec2 lookup(double mu, double roughness) const;
  // Cosine-weighted hemispherical means of A and B at roughness `r`.
  Vec2 average(double roughness) const;

  // Raw grid values; node (i, j) sits at mu_i = max((i / 63)^2, 1e-4),
  // r_j = (j / 63)^2. Nodes crowd toward grazing and low roughness where E
  // changes fastest.
  Vec2 node(int i, int j) const { return values_[j * kSize + i]; }
  static double node_mu(int i) { return std::max(sqr(i / double(kSize - 1)), 1e-4); }
  static double node_roughness(int j) { return sqr(j / double(kSize - 1)); }

  // Monte Carlo estimate of (A, B) at one point from `samples` VNDF samples.
  static Vec2 integrate(double mu, double roughness, int samples);

 private:
  BrdfTable();
  std::vector<Vec2> values_;
  std::array<Vec2, kSize> averages_{};
};

// Material quantities that depend only on the material and the outgoing
// direction, shared by evaluation, sampling and pdf queries.
class BrdfContext {
 public:
  // `wo_local` in the shading frame (z = normal). Requires wo_local.z > 0.
  BrdfContext(const MaterialSample& material, const Vec3& wo_local);

  Rgb specular_albedo() const { return e_o_; }
  Rgb diffuse_albedo() const { return diffuse_albedo_; }
  double specular_probability() const { return p_spec_; }

  struct Lobes {
    Rgb diffuse;
    Rgb specular;
    Rgb total() const { return diffuse + specular; }
  };
  Lobes eval(const Vec3& wi_local) const;
  double pdf(const Vec3& wi_local) const;
  // Direction from uniforms (u_lobe chooses the lobe, u shapes it); may lie
  // below the surface.
  Vec3 sample(double u_lobe, const Vec2& u) const;

 private:
  MaterialSample material_;
  Vec3 wo_;
  double alpha_;
  Rgb f0_;
  Rgb e_o_;             // specular albedo toward wo
  Rgb diffuse_scale_;   // (1 - m) a (1 - E(mu_o)) / (pi (1 - E_avg))
  Rgb e_avg_;
  Rgb diffuse_albedo_;  // (1 - m) a (1 - E(mu_o))
  double roughness_;
  double p_spec_;
};

struct BrdfSample {
  Vec3 direction;  // world space, unit
  double pdf = 0;  // solid-angle density of the lobe mixture
  Rgb value;       // f_r * |n . wi|; zero below the hemisphere
};

// World-space entry points. `n`, `wo`, `wi` must be unit within 1e-4
// (DomainError otherwise). Values are zero when wo or wi is below the
// surface.
Rgb brdf_eval(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi);
BrdfContext::Lobes brdf_eval_lobes(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi);
double brdf_pdf(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi);
// Empty when wo is at or below the horizon.
std::optional<BrdfSample> sample_brdf(const MaterialSample& material, const Vec3& n, const Vec3& wo,
                                      double u_lobe, const Vec2& u);
std::optional<BrdfSample> sample_brdf(const MaterialSample& material, const Vec3& n, const Vec3& wo, Pcg32& rng);

// GGX building blocks in the shading frame, exposed for tests and the
// split-sum prefilter.
double ggx_d(double alpha, double cos_h);
double smith_lambda(double alpha, double cos_theta);
double smith_g1(double alpha, double cos_theta);
double smith_g2(double alpha, double cos_o, double cos_i);
double schlick_weight(double cos_d);
// Visible normal of the GGX distribution seen from `wo` (Heitz 2018).
Vec3 sample_ggx_vndf(const Vec3& wo, double alpha, const Vec2& u);
// Normal distributed by D(h) (h.n), for prefiltering.
Vec3 sample_ggx_ndf(double alpha, const Vec2& u);

}  // namespace drforge
