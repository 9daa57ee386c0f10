// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drforge/color.hpp"
#include "drforge/image.hpp"
#include "drforge/math.hpp"
#include "drforge/radiometry.hpp"

namespace drforge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Aabb {
  Vec3 min{INFINITY, INFINITY, INFINITY};
  Vec3 max{-INFINITY, -INFINITY, -INFINITY};

  bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  void expand(const Vec3& p) {
    min = drforge::min(min, p);
    max = drforge::max(max, p);
  }
  void expand(const Aabb& b) {
    min = drforge::min(min, b.min);
    max = drforge::max(max, b.max);
  }
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 extent() const { return max - min; }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

// Open-interval overlap: boxes that merely touch do not overlap. `margin`
// inflates both boxes before testing.
bool overlaps(const Aabb& a, const Aabb& b, double margin = 0.0);

struct Mesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // per vertex, same size as positions
  std::vector<Vec2> uvs;      // per vertex, same size as positions
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

Mesh load_obj(const fs::path& path);
void save_obj(const fs::path& path, const Mesh& mesh);

// Tessellated analytic shapes, centered at the origin.
Mesh make_box(const Vec3& size);
Mesh make_sphere(double radius, int segments = 48, int rings = 24);
Mesh make_cylinder(double radius, double height, int segments = 48);
// Square in the y = 0 plane facing +Y with uv spanning [0, uv_repeat].
Mesh make_ground_quad(double half_extent, double uv_repeat);

// Axis-aligned bounds of the transformed vertices. Throws DomainError for an
// empty mesh.
Aabb aabb(const Mesh& mesh, const Transform& transform);

// ---------------------------------------------------------------------------
// Materials
// ---------------------------------------------------------------------------

// Base color / roughness / metallic, each either a constant or a texture map
// (empty path = constant). Texture lookups are bilinear with repeat wrapping
// and multiplied by uv_repeat. Base color maps are sRGB-encoded; roughness and
// metallic maps are linear and read from their first channel.
struct MaterialDesc {
  Rgb base_color{0.8, 0.8, 0.8};
  double roughness = 0.5;
  double metallic = 0.0;
  std::string base_color_map;
  std::string roughness_map;
  std::string metallic_map;
  double uv_repeat = 1.0;

  friend bool operator==(const MaterialDesc&, const MaterialDesc&) = default;
};

// Material parameters at a surface point; every channel in [0,1].
struct MaterialSample {
  Rgb base_color;
  double roughness = 1.0;
  double metallic = 0.0;
};

// Bilinear, repeat-wrapped lookup; v = 0 is the bottom row of the image.
Rgb sample_texture_rgb(const Image& image, const Vec2& uv);
double sample_texture_scalar(const Image& image, const Vec2& uv);

// Decoded textures keyed by path. With `srgb` set, 8-bit sources are
// converted to linear values on load.
class TextureCache {
 public:
  std::shared_ptr<const Image> get(const std::string& path, bool srgb);

 private:
  std::map<std::pair<std::string, bool>, std::shared_ptr<const Image>> images_;
};

// A material with its texture maps resolved.
struct ShadingMaterial {
  MaterialDesc desc;
  std::shared_ptr<const Image> base_color_map;
  std::shared_ptr<const Image> roughness_map;
  std::shared_ptr<const Image> metallic_map;

  MaterialSample evaluate(const Vec2& uv) const;
};

ShadingMaterial resolve_material(const MaterialDesc& desc, TextureCache& cache);

// ---------------------------------------------------------------------------
// Scene description
// ---------------------------------------------------------------------------

enum class BodyKind { asset, cube, sphere, cylinder };

struct SceneObject {
  std::string name;
  BodyKind kind = BodyKind::asset;
  std::string mesh_path;  // OBJ file, assets only
  // Primitive shape parameters: box size for cubes; (radius, -, -) for
  // spheres; (radius, height, -) for cylinders.
  Vec3 shape{1, 1, 1};
  Transform transform;
  MaterialDesc material;
  std::vector<Transform> track;  // per-frame transform; empty = static

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Pose {
  Vec3 position;
  Mat3 rotation;  // camera-to-world; the camera looks down local -Z

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct CameraTrack {
  std::vector<Pose> poses;  // one per frame
  double vfov = radians(45.0);

  int frame_count() const { return static_cast<int>(poses.size()); }
  friend bool operator==(const CameraTrack&, const CameraTrack&) = default;
};

Pose pose_at(const CameraTrack& track, int frame);

struct GroundPlane {
  double half_extent = 4.0;
  double height = 0.0;
  MaterialDesc material;

  friend bool operator==(const GroundPlane&, const GroundPlane&) = default;
};

struct EnvDesc {
  std::string path;
  double yaw = 0.0;
  bool flip = false;
  double scale = 1.0;
  std::vector<double> yaw_track;  // extra per-frame yaw; empty = static

  friend bool operator==(const EnvDesc&, const EnvDesc&) = default;
};

enum class MotionKind { none, orbit, oscillation, light_rotation, object_rotation, object_translation };

const char* to_string(MotionKind kind);
MotionKind motion_kind_from_string(const std::string& s);
const char* to_string(BodyKind kind);

struct SceneDescription {
  int version = 1;
  std::uint64_t seed = 0;
  std::optional<GroundPlane> ground;
  std::vector<SceneObject> objects;     // assets
  std::vector<SceneObject> primitives;  // cube / sphere / cylinder
  EnvDesc env;
  CameraTrack camera;
  MotionKind motion = MotionKind::none;

  int frame_count() const { return camera.frame_count(); }
  friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

std::string scene_to_json(const SceneDescription& scene);
SceneDescription scene_from_json(const std::string& text);
void save_scene(const fs::path& path, const SceneDescription& scene);
SceneDescription load_scene_description(const fs::path& path);

// Every body in placement order: objects first, then primitives.
std::vector<const SceneObject*> bodies(const SceneDescription& scene);
Transform body_transform(const SceneObject& body, int frame);
// Untransformed mesh of a body: OBJ for assets, tessellated shape otherwise.
Mesh body_mesh(const SceneObject& body);

// ---------------------------------------------------------------------------
// Loaded scene
// ---------------------------------------------------------------------------

// A description with its meshes, textures and environment resolved.
// Immutable after loading and safe to share between rendering threads.
struct Scene {
  SceneDescription desc;
  std::vector<std::shared_ptr<const Mesh>> meshes;  // parallel to bodies(desc)
  std::vector<ShadingMaterial> materials;           // parallel to bodies(desc)
  std::optional<ShadingMaterial> ground_material;
  EnvironmentMap env;                               // before augmentation
};

// Loads meshes, textures and the environment referenced by `desc`. When
// `env_override` is given the env path is ignored.
Scene load_scene(const SceneDescription& desc, std::optional<EnvironmentMap> env_override = std::nullopt);

// The augmented environment of a frame.
EnvironmentMap env_at(const Scene& scene, int frame);
double env_yaw_at(const SceneDescription& desc, int frame);

Aabb body_aabb(const Scene& scene, std::size_t body_index, int frame);

}  // namespace drforge
