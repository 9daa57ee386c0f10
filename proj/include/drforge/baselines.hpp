// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "drforge/bvh.hpp"
#include "drforge/image.hpp"
#include "drforge/pathtracer.hpp"
#include "drforge/radiometry.hpp"

namespace drforge {

// ---------------------------------------------------------------------------
// Screen-space ray tracing: a mesh reconstructed from the depth buffer,
// path traced with G-buffer materials.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultEdgeRatio = 1.2;

// Camera-space grid mesh with one vertex per hit pixel.
struct DepthMesh {
  int width = 0;
  int height = 0;
  std::vector<Vec3> positions;  // camera space
  std::vector<Vec3> normals;    // camera space, from the G-buffer
  std::vector<MaterialSample> materials;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> vertex_of_pixel;  // -1 for miss pixels
  int dropped_triangles = 0;         // cells split by a depth discontinuity

  int vertex(int x, int y) const { return vertex_of_pixel[static_cast<std::size_t>(y) * width + x]; }
};

// Unprojects every hit pixel center at its de-normalized depth and
// triangulates the pixel grid, dropping triangles whose max / min vertex view
// depth exceeds `edge_ratio`. Throws FormatError when the G-buffer has no
// depth range and DomainError when the camera resolution differs.
DepthMesh extract_depth_mesh(const GBuffer& gbuffer, const Camera& camera, double edge_ratio = kDefaultEdgeRatio);

// World-space geometry of a depth mesh with per-vertex materials.
Geometry depth_mesh_geometry(const DepthMesh& mesh, const Camera& camera);

// Radiance per pixel: surfaces come from the G-buffer at pixel centers and are
// shaded by the path tracer against the depth mesh; miss pixels show the
// environment. `settings.spp` paths per pixel.
Image ssrt_render(const GBuffer& gbuffer, const Camera& camera, const EnvironmentMap& env,
                  const RenderSettings& settings, double edge_ratio = kDefaultEdgeRatio, int frame = 0);

// ---------------------------------------------------------------------------
// Split-sum image-based lighting.
// ---------------------------------------------------------------------------

inline constexpr int kDefaultPrefilterLevels = 6;

struct PrefilteredEnv {
  // levels[l] is the source convolved with GGX at roughness l / (L - 1);
  // levels[0] is the source itself.
  std::vector<Image> levels;
  Image irradiance;  // cosine-weighted mean radiance around each normal

  int level_count() const { return static_cast<int>(levels.size()); }
  double level_roughness(int level) const;
  // Radiance along `dir` for roughness `r`, interpolated between the two
  // levels whose clamped roughness brackets max(r, 0.01).
  Rgb specular(const Vec3& dir, double roughness) const;
  // Cosine-weighted mean radiance for normal `n`.
  Rgb diffuse(const Vec3& n) const;
};

struct PrefilterOptions {
  int levels = kDefaultPrefilterLevels;
  int irradiance_width = 32;
  int threads = 0;
};

// Level l >= 1 convolves the solid-angle-weighted mip l (never narrower than
// 16 texels) with the cosine-weighted GGX lobe, truncated to the cone holding
// 99% of the half-vector distribution.
PrefilteredEnv prefilter_env(const EnvironmentMap& env, const PrefilterOptions& options = {});

// Bilinear equirect lookup of an RGB image with horizontal wrap.
Rgb sample_equirect(const Image& image, const Vec3& dir);

// Split-sum shading of a G-buffer:
//   diffuse  = (1 - m) a (1 - E(mu_o)) irradiance(n)
//   specular = prefiltered(reflect(wo, n), r) (F0 A(mu_o, r) + B(mu_o, r))
// Miss pixels show the environment level 0.
struct SplitSumImage {
  Image diffuse;
  Image specular;
  Image total;
};
SplitSumImage splitsum_shade_lobes(const GBuffer& gbuffer, const PrefilteredEnv& env, const Camera& camera,
                                   int threads = 0);
Image splitsum_shade(const GBuffer& gbuffer, const PrefilteredEnv& env, const Camera& camera, int threads = 0);

// Multi-part EXR cache: parts "level_<l>" and "irradiance".
void save_prefiltered(const std::filesystem::path& path, const PrefilteredEnv& env);
PrefilteredEnv load_prefiltered(const std::filesystem::path& path);

}  // namespace drforge
