// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/scene.hpp"

#include <json.hpp>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"

namespace drforge {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Materials
// ---------------------------------------------------------------------------

std::shared_ptr<const Image> TextureCache::get(const std::string& path, bool srgb) {
  auto key = std::make_pair(path, srgb);
  if (auto it = images_.find(key); it != images_.end()) return it->second;
  fs::path p(path);
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Image image;
  if (ext == ".exr") {
    image = read_exr(p).image;
  } else if (ext == ".png") {
    image = read_png(p);
    if (srgb)
      for (float& v : image.data) v = static_cast<float>(srgb_decode(v));
  } else {
    throw FormatError("unsupported texture format: " + path);
  }
  auto shared = std::make_shared<const Image>(std::move(image));
  images_.emplace(key, shared);
  return shared;
}

ShadingMaterial resolve_material(const MaterialDesc& desc, TextureCache& cache) {
  ShadingMaterial m;
  m.desc = desc;
  if (!desc.base_color_map.empty()) m.base_color_map = cache.get(desc.base_color_map, true);
  if (!desc.roughness_map.empty()) m.roughness_map = cache.get(desc.roughness_map, false);
  if (!desc.metallic_map.empty()) m.metallic_map = cache.get(desc.metallic_map, false);
  return m;
}

MaterialSample ShadingMaterial::evaluate(const Vec2& uv) const {
  Vec2 st{uv.x * desc.uv_repeat, uv.y * desc.uv_repeat};
  MaterialSample s;
  s.base_color = clamp01(base_color_map ? sample_texture_rgb(*base_color_map, st) : desc.base_color);
  s.roughness = std::clamp(roughness_map ? sample_texture_scalar(*roughness_map, st) : desc.roughness, 0.0, 1.0);
  s.metallic = std::clamp(metallic_map ? sample_texture_scalar(*metallic_map, st) : desc.metallic, 0.0, 1.0);
  return s;
}

// ---------------------------------------------------------------------------
// Description helpers
// ---------------------------------------------------------------------------

Pose pose_at(const CameraTrack& track, int frame) {
  if (frame < 0 || frame >= track.frame_count())
    throw IndexError("pose_at: frame " + std::to_string(frame) + " outside [0, " +
                     std::to_string(track.frame_count()) + ")");
  return track.poses[frame];
}

const char* to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::none: return "none";
    case MotionKind::orbit: return "orbit";
    case MotionKind::oscillation: return "oscillation";
    case MotionKind::light_rotation: return "light_rotation";
    case MotionKind::object_rotation: return "object_rotation";
    case MotionKind::object_translation: return "object_translation";
  }
  return "none";
}

MotionKind motion_kind_from_string(const std::string& s) {
  for (auto k : {MotionKind::none, MotionKind::orbit, MotionKind::oscillation, MotionKind::light_rotation,
                 MotionKind::object_rotation, MotionKind::object_translation})
    if (s == to_string(k)) return k;
  throw FormatError("unknown motion kind '" + s + "'");
}

const char* to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::asset: return "asset";
    case BodyKind::cube: return "cube";
    case BodyKind::sphere: return "sphere";
    case BodyKind::cylinder: return "cylinder";
  }
  return "asset";
}

static BodyKind body_kind_from_string(const std::string& s) {
  for (auto k : {BodyKind::asset, BodyKind::cube, BodyKind::sphere, BodyKind::cylinder})
    if (s == to_string(k)) return k;
  throw FormatError("unknown body kind '" + s + "'");
}

std::vector<const SceneObject*> bodies(const SceneDescription& scene) {
  std::vector<const SceneObject*> out;
  for (const auto& o : scene.objects) out.push_back(&o);
  for (const auto& p : scene.primitives) out.push_back(&p);
  return out;
}

Transform body_transform(const SceneObject& body, int frame) {
  if (body.track.empty()) return body.transform;
  if (frame < 0 || frame >= static_cast<int>(body.track.size()))
    throw IndexError("body '" + body.name + "' has no transform for frame " + std::to_string(frame));
  return body.track[frame];
}

Mesh body_mesh(const SceneObject& body) {
  switch (body.kind) {
    case BodyKind::asset:
      if (body.mesh_path.empty()) throw FormatError("asset '" + body.name + "' has no mesh path");
      return load_obj(body.mesh_path);
    case BodyKind::cube: return make_box(body.shape);
    case BodyKind::sphere: return make_sphere(body.shape.x);
    case BodyKind::cylinder: return make_cylinder(body.shape.x, body.shape.y);
  }
  throw FormatError("unknown body kind");
}

double env_yaw_at(const SceneDescription& desc, int frame) {
  if (desc.env.yaw_track.empty()) return desc.env.yaw;
  if (frame < 0 || frame >= static_cast<int>(desc.env.yaw_track.size()))
    throw IndexError("env yaw track has no frame " + std::to_string(frame));
  return desc.env.yaw + desc.env.yaw_track[frame];
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

static json to_j(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
static Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
static json to_j(const Rgb& c) { return json::array({c.r, c.g, c.b}); }
static Rgb rgb_from(const json& j) {
  Vec3 v = vec3_from(j);
  return {v.x, v.y, v.z};
}
// Rotations are stored as their three columns.
static json to_j(const Mat3& m) { return json::array({to_j(m.x), to_j(m.y), to_j(m.z)}); }
static Mat3 mat3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3x3 matrix");
  return {vec3_from(j[0]), vec3_from(j[1]), vec3_from(j[2])};
}
static json to_j(const Transform& t) {
  return {{"translation", to_j(t.translation)}, {"rotation", to_j(t.rotation)}, {"scale", t.scale}};
}
static Transform transform_from(const json& j) {
  Transform t;
  t.translation = vec3_from(j.at("translation"));
  t.rotation = mat3_from(j.at("rotation"));
  t.scale = j.at("scale").get<double>();
  if (!(t.scale > 0)) throw FormatError("transform scale must be > 0");
  return t;
}
static json to_j(const MaterialDesc& m) {
  return {{"base_color", to_j(m.base_color)}, {"roughness", m.roughness},         {"metallic", m.metallic},
          {"base_color_map", m.base_color_map}, {"roughness_map", m.roughness_map}, {"metallic_map", m.metallic_map},
          {"uv_repeat", m.uv_repeat}};
}
static MaterialDesc material_from(const json& j) {
  MaterialDesc m;
  m.base_color = rgb_from(j.at("base_color"));
  m.roughness = j.at("roughness").get<double>();
  m.metallic = j.at("metallic").get<double>();
  m.base_color_map = j.value("base_color_map", "");
  m.roughness_map = j.value("roughness_map", "");
  m.metallic_map = j.value("metallic_map", "");
  m.uv_repeat = j.value("uv_repeat", 1.0);
  return m;
}
static json to_j(const SceneObject& o) {
  json track = json::array();
  for (const auto& t : o.track) track.push_back(to_j(t));
  return {{"name", o.name},           {"kind", to_string(o.kind)},   {"mesh", o.mesh_path},
          {"shape", to_j(o.shape)},   {"transform", to_j(o.transform)}, {"material", to_j(o.material)},
          {"track", std::move(track)}};
}
static SceneObject object_from(const json& j) {
  SceneObject o;
  o.name = j.value("name", "");
  o.kind = body_kind_from_string(j.at("kind").get<std::string>());
  o.mesh_path = j.value("mesh", "");
  o.shape = vec3_from(j.at("shape"));
  o.transform = transform_from(j.at("transform"));
  o.material = material_from(j.at("material"));
  for (const auto& t : j.value("track", json::array())) o.track.push_back(transform_from(t));
  return o;
}

std::string scene_to_json(const SceneDescription& s) {
  json j;
  j["version"] = s.version;
  j["seed"] = s.seed;
  if (s.ground)
    j["ground"] = {{"half_extent", s.ground->half_extent},
                   {"height", s.ground->height},
                   {"material", to_j(s.ground->material)}};
  else
    j["ground"] = nullptr;
  j["objects"] = json::array();
  for (const auto& o : s.objects) j["objects"].push_back(to_j(o));
  j["primitives"] = json::array();
  for (const auto& p : s.primitives) j["primitives"].push_back(to_j(p));
  j["env"] = {{"path", s.env.path}, {"yaw", s.env.yaw}, {"flip", s.env.flip}, {"scale", s.env.scale},
              {"yaw_track", s.env.yaw_track}};
  json poses = json::array();
  for (const auto& p : s.camera.poses) poses.push_back({{"position", to_j(p.position)}, {"rotation", to_j(p.rotation)}});
  j["camera"] = {{"vfov", s.camera.vfov}, {"poses", std::move(poses)}};
  j["motion"] = to_string(s.motion);
  return j.dump(2);
}

SceneDescription scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene json: ") + e.what());
  }
  try {
    SceneDescription s;
    s.version = j.at("version").get<int>();
    if (s.version != 1) throw FormatError("unsupported scene version " + std::to_string(s.version));
    s.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("ground").is_null()) {
      GroundPlane g;
      g.half_extent = j["ground"].at("half_extent").get<double>();
      g.height = j["ground"].value("height", 0.0);
      g.material = material_from(j["ground"].at("material"));
      s.ground = g;
    }
    for (const auto& o : j.at("objects")) s.objects.push_back(object_from(o));
    for (const auto& p : j.at("primitives")) s.primitives.push_back(object_from(p));
    const json& env = j.at("env");
    s.env.path = env.value("path", "");
    s.env.yaw = env.value("yaw", 0.0);
    s.env.flip = env.value("flip", false);
    s.env.scale = env.value("scale", 1.0);
    s.env.yaw_track = env.value("yaw_track", std::vector<double>{});
    s.camera.vfov = j.at("camera").at("vfov").get<double>();
    for (const auto& p : j["camera"].at("poses"))
      s.camera.poses.push_back({vec3_from(p.at("position")), mat3_from(p.at("rotation"))});
    s.motion = motion_kind_from_string(j.value("motion", "none"));
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene json: ") + e.what());
  }
}

void save_scene(const fs::path& path, const SceneDescription& scene) {
  write_text_atomically(path, scene_to_json(scene) + "\n");
}

SceneDescription load_scene_description(const fs::path& path) { return scene_from_json(read_text(path)); }

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

Scene load_scene(const SceneDescription& desc, std::optional<EnvironmentMap> env_override) {
  if (desc.camera.poses.empty()) throw FormatError("scene has no camera poses");
  for (const auto& p : desc.camera.poses)
    if (!is_orthonormal(p.rotation, 1e-6)) throw FormatError("camera rotation is not orthonormal");

  Scene scene;
  scene.desc = desc;
  TextureCache textures;
  std::map<std::string, std::shared_ptr<const Mesh>> assets;
  for (const SceneObject* body : bodies(desc)) {
    std::shared_ptr<const Mesh> mesh;
    if (body->kind == BodyKind::asset) {
      auto& slot = assets[body->mesh_path];
      if (!slot) slot = std::make_shared<const Mesh>(body_mesh(*body));
      mesh = slot;
    } else {
      mesh = std::make_shared<const Mesh>(body_mesh(*body));
    }
    scene.meshes.push_back(std::move(mesh));
    scene.materials.push_back(resolve_material(body->material, textures));
  }
  if (desc.ground) scene.ground_material = resolve_material(desc.ground->material, textures);
  if (env_override)
    scene.env = std::move(*env_override);
  else if (!desc.env.path.empty())
    scene.env = load_environment(desc.env.path);
  else
    throw FormatError("scene has no environment map");
  return scene;
}

EnvironmentMap env_at(const Scene& scene, int frame) {
  return augment_env(scene.env, env_yaw_at(scene.desc, frame), scene.desc.env.flip, scene.desc.env.scale);
}

Aabb body_aabb(const Scene& scene, std::size_t body_index, int frame) {
  auto all = bodies(scene.desc);
  if (body_index >= all.size()) throw IndexError("body index out of range");
  return aabb(*scene.meshes[body_index], body_transform(*all[body_index], frame));
}

}  // namespace drforge
