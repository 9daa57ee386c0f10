// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "drforge/scene.hpp"

namespace drforge {

// Asset pools. Textures are directories holding basecolor.png and optionally
// roughness.png / metallic.png (linear, first channel).
struct AssetPools {
  std::vector<fs::path> meshes;    // *.obj
  std::vector<fs::path> textures;  // material directories
  std::vector<fs::path> envs;      // *.exr equirectangular maps
};

// Scans the three pool directories (sorted, so the result is reproducible).
AssetPools scan_pools(const fs::path& asset_dir, const fs::path& texture_dir, const fs::path& env_dir);

inline constexpr int kMotionKindCount = 5;
inline constexpr std::array<MotionKind, kMotionKindCount> kMotionKinds{
    MotionKind::orbit, MotionKind::oscillation, MotionKind::light_rotation, MotionKind::object_rotation,
    MotionKind::object_translation};

struct GenConfig {
  AssetPools pools;
  int max_objects = 3;
  int max_primitives = 3;
  double plane_half_extent = 4.0;
  double placement_half_extent = 2.0;  // bodies are centered within this square
  double object_size_min = 0.5;        // largest AABB extent of an asset, meters
  double object_size_max = 1.2;
  double primitive_size_min = 0.25;
  double primitive_size_max = 0.7;
  double primitive_texture_probability = 0.5;
  double texture_repeat_min = 1.0;
  double texture_repeat_max = 4.0;
  double ground_repeat = 4.0;
  double camera_distance_min = 3.5;
  double camera_distance_max = 5.5;
  double elevation_min_deg = 12.0;
  double elevation_max_deg = 40.0;
  double vfov_deg = 45.0;
  double env_scale_min = 0.5;
  double env_scale_max = 2.0;
  double oscillation_amplitude = 0.05;  // fraction of the camera distance
  double translation_min = 0.4;
  double translation_max = 1.5;
  std::array<double, kMotionKindCount> motion_weights{1, 1, 1, 1, 1};
  int frames = 24;
  int resolution = 512;
  int retry_limit = 100;
  double gap = 0.02;  // minimum clearance between placed boxes

  // Throws DomainError when a field is out of range.
  void validate() const;
};

// Thread-safe cache of untransformed body meshes keyed by their description.
class MeshCache {
 public:
  std::shared_ptr<const Mesh> get(const SceneObject& body);
  // Bounds of the untransformed mesh.
  Aabb local_bounds(const SceneObject& body);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Mesh>> meshes_;
  std::map<std::string, Aabb> bounds_;
};

// Plane, 1..max_objects assets and 0..max_primitives primitives resting on it
// with pairwise-disjoint boxes, environment and a static camera of
// config.frames poses. Deterministic in (config, seed). Throws GenerationError
// when placement exceeds the retry limit.
SceneDescription generate_scene(const GenConfig& config, std::uint64_t seed, MeshCache& meshes);

struct MotionTracks {
  MotionKind kind = MotionKind::none;
  std::vector<Pose> camera;                        // one per frame
  std::vector<double> env_yaw;                     // added to the env yaw; empty = static
  std::map<std::size_t, std::vector<Transform>> bodies;  // body index -> per-frame transform
};

// Per-frame tracks for `kind`. Object kinds move the asset objects and keep
// every frame collision free; when no collision-free path is found the motion
// is reduced and ultimately falls back to static bodies.
MotionTracks generate_motion(MotionKind kind, const SceneDescription& scene, int frames, std::uint64_t seed,
                             const GenConfig& config, MeshCache& meshes);

void apply_motion(SceneDescription& scene, const MotionTracks& tracks);

// Motion kind drawn from config.motion_weights.
MotionKind sample_motion_kind(const GenConfig& config, std::uint64_t seed);

// generate_scene + sample_motion_kind + generate_motion + apply_motion.
SceneDescription generate_clip(const GenConfig& config, std::uint64_t seed, MeshCache& meshes);

// Overlap and plane-penetration findings over every frame; empty when safe.
std::vector<std::string> check_safety(const SceneDescription& scene, MeshCache& meshes);

}  // namespace drforge
