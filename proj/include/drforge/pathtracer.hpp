// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drforge/brdf.hpp"
#include "drforge/bvh.hpp"
#include "drforge/env_sampler.hpp"
#include "drforge/image.hpp"
#include "drforge/radiometry.hpp"
#include "drforge/rng.hpp"
#include "drforge/scene.hpp"

namespace drforge {

enum class Tonemap { agx, reinhard };
const char* to_string(Tonemap t);
Tonemap tonemap_from_string(const std::string& s);

// Display-encoded LDR value in [0,1]: AgX output as is, Reinhard followed by
// the sRGB transfer curve.
Rgb display_tonemap(const Rgb& hdr, Tonemap tonemap);
Image tonemap_image(const Image& hdr, Tonemap tonemap);

// Light transport estimators. `mis` combines BRDF and environment sampling
// with the balance heuristic; the other two keep a single strategy.
enum class Strategy { mis, brdf_only, light_only };

struct RenderSettings {
  int width = 512;
  int height = 512;
  int spp = 256;
  int max_bounces = 8;
  std::uint64_t seed = 0;
  Tonemap tonemap = Tonemap::agx;
  double firefly_clamp = 64.0;  // max channel of any single surface contribution
  int threads = 0;              // 0: DR_FORGE_THREADS or hardware concurrency
  Strategy strategy = Strategy::mis;

  void validate() const;
};

// Pinhole camera looking down its local -Z with +Y up. Pixel coordinates are
// continuous with (0, 0) at the top-left corner; pixel centers sit at +0.5.
struct Camera {
  Pose pose;
  double vfov = radians(45.0);
  int width = 0;
  int height = 0;

  // World-space ray through continuous pixel position (px, py).
  Ray generate_ray(double px, double py) const;
  Vec3 to_camera(const Vec3& world) const { return transpose(pose.rotation) * (world - pose.position); }
  Vec3 to_world(const Vec3& camera) const { return pose.rotation * camera + pose.position; }
  // Pixel position of a camera-space point in front of the camera.
  Vec2 project(const Vec3& camera_point) const;
  // Camera-space point on the ray through (px, py) at view depth `depth`
  // (distance along -Z).
  Vec3 unproject(double px, double py, double depth) const;
};

Camera camera_for(const SceneDescription& desc, int frame, int width, int height);

// World-space triangles of every body at `frame`, plus the ground quad.
Geometry build_geometry(const Scene& scene, int frame);

class PathIntegrator {
 public:
  PathIntegrator(const Geometry& geometry, EnvironmentMap env, const RenderSettings& settings);

  // Radiance arriving along `ray` (environment radiance on a miss).
  Rgb trace(const Ray& ray, Pcg32& rng) const;
  // Radiance leaving surface point `sp` toward `wo`.
  Rgb shade_surface(const SurfacePoint& sp, const Vec3& wo, Pcg32& rng) const;

  const Geometry& geometry() const { return *geometry_; }
  const Bvh& bvh() const { return bvh_; }
  const EnvironmentMap& env() const { return env_; }

 private:
  const Geometry* geometry_;
  Bvh bvh_;
  EnvironmentMap env_;
  EnvSampler sampler_;
  RenderSettings settings_;
};

// Per-sample random stream; identical for a given (seed, frame, x, y, sample).
inline Pcg32 sample_stream(std::uint64_t seed, int frame, int x, int y, int sample) {
  return Pcg32::keyed({seed, static_cast<std::uint64_t>(frame), static_cast<std::uint64_t>(x),
                       static_cast<std::uint64_t>(y), static_cast<std::uint64_t>(sample)});
}

// HDR image of `geometry` under `env` with jittered primary rays.
Image render_image(const Geometry& geometry, const EnvironmentMap& env, const Camera& camera,
                   const RenderSettings& settings, int frame);
Image render_frame(const Scene& scene, int frame, const RenderSettings& settings);
std::vector<Image> render(const Scene& scene, const RenderSettings& settings);

// ---------------------------------------------------------------------------
// G-buffer
// ---------------------------------------------------------------------------

struct DepthRange {
  double z_min = 0;
  double z_max = 0;
  friend bool operator==(const DepthRange&, const DepthRange&) = default;
};

// Per-pixel primary-hit attributes. Normals are camera-space and face the
// viewer; depth is normalized to [-1, 1] once depth_range is set and holds
// raw view depth before. Miss pixels: depth +1, hit 0, materials 0, normal 0.
struct GBuffer {
  int width = 0;
  int height = 0;
  Image normal;      // 3 channels
  Image depth;       // 1 channel
  Image base_color;  // 3 channels
  Image roughness;   // 1 channel
  Image metallic;    // 1 channel
  Image hit;         // 1 channel, 0 or 1
  std::optional<DepthRange> depth_range;

  GBuffer() = default;
  GBuffer(int w, int h);
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool is_hit(int x, int y) const { return hit.at(x, y) > 0.5f; }
  MaterialSample material(int x, int y) const;
};

// Pixel-center primary rays; depth left as raw view depth.
GBuffer render_gbuffer_raw(const Geometry& geometry, const Camera& camera, int threads = 0);
// Maps raw depths of all buffers to [-1, 1] using the min / max over hit
// pixels of every buffer (constant depth maps to -1) and records the range.
DepthRange normalize_depth(std::vector<GBuffer>& buffers);
double denormalize_depth(double d, const DepthRange& range);

// One frame normalized on its own.
GBuffer render_gbuffer(const Scene& scene, int frame, const RenderSettings& settings);
// Every frame of the clip, normalized with one shared range.
std::vector<GBuffer> render_gbuffer_clip(const Scene& scene, const RenderSettings& settings);

}  // namespace drforge
