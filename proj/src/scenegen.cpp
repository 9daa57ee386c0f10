// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/scenegen.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "drforge/error.hpp"
#include "drforge/rng.hpp"

namespace drforge {

namespace {

// Stream tags so each stage draws from an independent sequence.
constexpr std::uint64_t kSceneStream = 0x5ce9e;
constexpr std::uint64_t kMotionKindStream = 0x30710;
constexpr std::uint64_t kMotionStream = 0x7ac5;

constexpr double kCameraClearance = 0.3;
constexpr int kMaxHalvings = 4;

std::string lowercase_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("pool directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string cache_key(const SceneObject& body) {
  if (body.kind == BodyKind::asset) return "asset:" + body.mesh_path;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s:%.17g:%.17g:%.17g", to_string(body.kind), body.shape.x, body.shape.y,
                body.shape.z);
  return buf;
}

Aabb translated(const Aabb& b, const Vec3& t) { return {b.min + t, b.max + t}; }

bool contains(const Aabb& b, const Vec3& p, double margin) {
  return p.x > b.min.x - margin && p.x < b.max.x + margin && p.y > b.min.y - margin && p.y < b.max.y + margin &&
         p.z > b.min.z - margin && p.z < b.max.z + margin;
}

double ground_height(const SceneDescription& s) { return s.ground ? s.ground->height : 0.0; }

MaterialDesc texture_material(const fs::path& dir, Pcg32& rng, double repeat) {
  MaterialDesc m;
  m.base_color = Rgb(1.0);
  m.base_color_map = (dir / "basecolor.png").string();
  if (fs::exists(dir / "roughness.png"))
    m.roughness_map = (dir / "roughness.png").string();
  else
    m.roughness = rng.uniform(0.2, 1.0);
  if (fs::exists(dir / "metallic.png"))
    m.metallic_map = (dir / "metallic.png").string();
  else
    m.metallic = 0.0;
  m.uv_repeat = repeat;
  return m;
}

MaterialDesc monolithic_material(Pcg32& rng) {
  MaterialDesc m;
  double r = rng.uniform(0.05, 0.95), g = rng.uniform(0.05, 0.95), b = rng.uniform(0.05, 0.95);
  m.base_color = {r, g, b};
  m.roughness = rng.uniform(0.05, 1.0);
  m.metallic = rng.uniform();
  return m;
}

// Center of the body boxes at frame 0; the camera looks at and orbits it.
Vec3 scene_pivot(const SceneDescription& scene, MeshCache& meshes) {
  Vec3 sum;
  int n = 0;
  for (const SceneObject* b : bodies(scene)) {
    sum += aabb(*meshes.get(*b), body_transform(*b, 0)).center();
    ++n;
  }
  return n > 0 ? sum / n : Vec3{0, 0.5, 0};
}

// Horizontal radius around the pivot that encloses every body box.
double bodies_radius(const SceneDescription& scene, MeshCache& meshes, const Vec3& pivot) {
  double r = 0;
  for (const SceneObject* b : bodies(scene)) {
    Aabb box = aabb(*meshes.get(*b), body_transform(*b, 0));
    for (double x : {box.min.x, box.max.x})
      for (double z : {box.min.z, box.max.z}) r = std::max(r, std::hypot(x - pivot.x, z - pivot.z));
  }
  return r;
}

// Per-frame boxes of every body with the given tracks substituted in.
struct FrameBoxes {
  std::vector<std::vector<Aabb>> boxes;  // [body][frame]
};

FrameBoxes frame_boxes(const SceneDescription& scene, MeshCache& meshes, int frames) {
  FrameBoxes fb;
  for (const SceneObject* b : bodies(scene)) {
    auto mesh = meshes.get(*b);
    std::vector<Aabb> per;
    if (b->track.empty()) {
      per.assign(frames, aabb(*mesh, b->transform));
    } else {
      for (int f = 0; f < frames; ++f) per.push_back(aabb(*mesh, body_transform(*b, f)));
    }
    fb.boxes.push_back(std::move(per));
  }
  return fb;
}

}  // namespace

AssetPools scan_pools(const fs::path& asset_dir, const fs::path& texture_dir, const fs::path& env_dir) {
  AssetPools pools;
  for (const auto& p : sorted_entries(asset_dir))
    if (lowercase_ext(p) == ".obj") pools.meshes.push_back(p);
  for (const auto& p : sorted_entries(texture_dir))
    if (fs::is_directory(p) && fs::exists(p / "basecolor.png")) pools.textures.push_back(p);
  for (const auto& p : sorted_entries(env_dir))
    if (lowercase_ext(p) == ".exr") pools.envs.push_back(p);
  return pools;
}

void GenConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("generator config: ") + what);
  };
  require(max_objects >= 1, "max_objects must be >= 1");
  require(max_primitives >= 0, "max_primitives must be >= 0");
  require(retry_limit >= 1, "retry_limit must be >= 1");
  require(frames >= 1, "frames must be >= 1");
  require(resolution >= 1, "resolution must be >= 1");
  require(plane_half_extent > 0 && placement_half_extent > 0, "extents must be > 0");
  require(placement_half_extent <= plane_half_extent, "placement region must lie on the plane");
  require(object_size_min > 0 && object_size_min <= object_size_max, "object size range");
  require(primitive_size_min > 0 && primitive_size_min <= primitive_size_max, "primitive size range");
  require(texture_repeat_min > 0 && texture_repeat_min <= texture_repeat_max, "texture repeat range");
  require(ground_repeat > 0, "ground_repeat must be > 0");
  require(camera_distance_min > 0 && camera_distance_min <= camera_distance_max, "camera distance range");
  require(elevation_min_deg > 0 && elevation_min_deg <= elevation_max_deg && elevation_max_deg < 90,
          "elevation range");
  require(vfov_deg > 0 && vfov_deg < 180, "vfov");
  require(env_scale_min > 0 && env_scale_min <= env_scale_max, "env scale range");
  require(oscillation_amplitude >= 0 && oscillation_amplitude <= 0.05, "oscillation amplitude in [0, 0.05]");
  require(translation_min > 0 && translation_min <= translation_max, "translation range");
  require(primitive_texture_probability >= 0 && primitive_texture_probability <= 1, "texture probability");
  require(gap >= 0, "gap must be >= 0");
  double sum = 0;
  for (double w : motion_weights) {
    require(w >= 0, "motion weights must be >= 0");
    sum += w;
  }
  require(sum > 0, "motion weights must not all be zero");
}

std::shared_ptr<const Mesh> MeshCache::get(const SceneObject& body) {
  std::string key = cache_key(body);
  {
    std::lock_guard lock(mutex_);
    if (auto it = meshes_.find(key); it != meshes_.end()) return it->second;
  }
  auto mesh = std::make_shared<const Mesh>(body_mesh(body));
  std::lock_guard lock(mutex_);
  return meshes_.emplace(key, mesh).first->second;
}

Aabb MeshCache::local_bounds(const SceneObject& body) {
  std::string key = cache_key(body);
  {
    std::lock_guard lock(mutex_);
    if (auto it = bounds_.find(key); it != bounds_.end()) return it->second;
  }
  Aabb b = aabb(*get(body), Transform{});
  std::lock_guard lock(mutex_);
  bounds_[key] = b;
  return b;
}

SceneDescription generate_scene(const GenConfig& config, std::uint64_t seed, MeshCache& meshes) {
  config.validate();
  const AssetPools& pools = config.pools;
  if (pools.meshes.empty() || pools.textures.empty() || pools.envs.empty())
    throw DomainError("generate_scene: asset, texture and environment pools must be non-empty");

  Pcg32 rng = Pcg32::keyed({seed, kSceneStream});
  auto pick = [&](const std::vector<fs::path>& pool) -> const fs::path& {
    return pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
  };

  SceneDescription scene;
  scene.seed = seed;
  GroundPlane ground;
  ground.half_extent = config.plane_half_extent;
  ground.material = texture_material(pick(pools.textures), rng, config.ground_repeat);
  scene.ground = ground;
  const double floor_y = ground.height;

  const int n_objects = rng.uniform_int(1, config.max_objects);
  const int n_primitives = rng.uniform_int(0, config.max_primitives);

  std::vector<Aabb> placed;
  // Places `body` with a random yaw and position so its box rests on the
  // plane and clears every previously placed box.
  auto place = [&](SceneObject& body, double yaw) {
    body.transform.rotation = rotation_y(yaw);
    Aabb local = aabb(*meshes.get(body), Transform{{}, body.transform.rotation, body.transform.scale});
    Vec3 half = local.extent() * 0.5;
    double reach = config.placement_half_extent;
    double limit = config.plane_half_extent;
    for (int attempt = 0; attempt < config.retry_limit; ++attempt) {
      double cx = rng.uniform(-reach, reach);
      double cz = rng.uniform(-reach, reach);
      if (std::abs(cx) + half.x > limit || std::abs(cz) + half.z > limit) continue;
      Vec3 t{cx - local.center().x, floor_y - local.min.y, cz - local.center().z};
      Aabb box = translated(local, t);
      bool clear = std::none_of(placed.begin(), placed.end(),
                                [&](const Aabb& other) { return overlaps(box, other, config.gap); });
      if (clear) {
        body.transform.translation = t;
        placed.push_back(box);
        return;
      }
    }
    throw GenerationError("placement of '" + body.name + "' failed after " + std::to_string(config.retry_limit) +
                          " attempts for seed " + std::to_string(seed));
  };

  for (int i = 0; i < n_objects; ++i) {
    SceneObject obj;
    obj.name = "object_" + std::to_string(i);
    obj.kind = BodyKind::asset;
    obj.mesh_path = pick(pools.meshes).string();
    Aabb bounds = meshes.local_bounds(obj);
    double extent = max_component(bounds.extent());
    if (!(extent > 0)) throw GenerationError("asset has a degenerate extent: " + obj.mesh_path);
    obj.transform.scale = rng.uniform(config.object_size_min, config.object_size_max) / extent;
    obj.material = texture_material(pick(pools.textures), rng,
                                    rng.uniform(config.texture_repeat_min, config.texture_repeat_max));
    place(obj, rng.uniform(0, kTwoPi));
    scene.objects.push_back(std::move(obj));
  }

  static constexpr BodyKind kPrimitiveKinds[] = {BodyKind::cube, BodyKind::sphere, BodyKind::cylinder};
  for (int i = 0; i < n_primitives; ++i) {
    SceneObject prim;
    prim.kind = kPrimitiveKinds[rng.uniform_int(0, 2)];
    prim.name = std::string(to_string(prim.kind)) + "_" + std::to_string(i);
    auto size = [&] { return rng.uniform(config.primitive_size_min, config.primitive_size_max); };
    switch (prim.kind) {
      case BodyKind::cube: {
        double sx = size(), sy = size(), sz = size();
        prim.shape = {sx, sy, sz};
        break;
      }
      case BodyKind::sphere: prim.shape = {size() * 0.5, 0, 0}; break;
      case BodyKind::cylinder: {
        double r = size() * 0.5;
        prim.shape = {r, size(), 0};
        break;
      }
      case BodyKind::asset: break;
    }
    if (rng.coin(config.primitive_texture_probability))
      prim.material = texture_material(pick(pools.textures), rng,
                                       rng.uniform(config.texture_repeat_min, config.texture_repeat_max));
    else
      prim.material = monolithic_material(rng);
    place(prim, rng.uniform(0, kTwoPi));
    scene.primitives.push_back(std::move(prim));
  }

  scene.env.path = pick(pools.envs).string();
  scene.env.yaw = rng.uniform(0, kTwoPi);
  scene.env.flip = rng.coin();
  scene.env.scale = rng.uniform(config.env_scale_min, config.env_scale_max);

  // Camera on a sphere around the pivot, far enough out that the whole orbit
  // and any oscillation stay clear of the bodies.
  Vec3 pivot = scene_pivot(scene, meshes);
  double radius = bodies_radius(scene, meshes, pivot);
  double azimuth = rng.uniform(0, kTwoPi);
  double elevation = radians(rng.uniform(config.elevation_min_deg, config.elevation_max_deg));
  double distance = rng.uniform(config.camera_distance_min, config.camera_distance_max);
  double wobble = 1.0 - std::sqrt(3.0) * config.oscillation_amplitude;
  distance = std::max(distance, (radius + kCameraClearance) / (std::cos(elevation) * wobble));
  Vec3 eye = pivot + Vec3{std::cos(elevation) * std::sin(azimuth), std::sin(elevation),
                          std::cos(elevation) * std::cos(azimuth)} *
                         distance;
  Pose pose{eye, look_at_rotation(eye, pivot)};
  scene.camera.vfov = radians(config.vfov_deg);
  scene.camera.poses.assign(config.frames, pose);
  scene.motion = MotionKind::none;
  return scene;
}

MotionKind sample_motion_kind(const GenConfig& config, std::uint64_t seed) {
  Pcg32 rng = Pcg32::keyed({seed, kMotionKindStream});
  double total = std::accumulate(config.motion_weights.begin(), config.motion_weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (int i = 0; i < kMotionKindCount; ++i) {
    if (u < config.motion_weights[i]) return kMotionKinds[i];
    u -= config.motion_weights[i];
  }
  for (int i = kMotionKindCount - 1; i >= 0; --i)
    if (config.motion_weights[i] > 0) return kMotionKinds[i];
  return MotionKind::orbit;
}

MotionTracks generate_motion(MotionKind kind, const SceneDescription& scene, int frames, std::uint64_t seed,
                             const GenConfig& config, MeshCache& meshes) {
  if (frames < 1) throw DomainError("generate_motion: frames must be >= 1");
  if (kind != MotionKind::none && frames < 2)
    throw DomainError(std::string("generate_motion: ") + to_string(kind) + " needs at least 2 frames");
  if (scene.camera.poses.empty()) throw DomainError("generate_motion: scene has no camera pose");
  if ((kind == MotionKind::object_rotation || kind == MotionKind::object_translation) && scene.objects.empty())
    throw DomainError(std::string("generate_motion: ") + to_string(kind) + " needs at least one object");

  Pcg32 rng = Pcg32::keyed({seed, kMotionStream, static_cast<std::uint64_t>(kind)});
  MotionTracks tracks;
  tracks.kind = kind;
  const Pose initial = scene.camera.poses.front();
  tracks.camera.assign(frames, initial);
  const Vec3 pivot = scene_pivot(scene, meshes);

  switch (kind) {
    case MotionKind::none:
    case MotionKind::light_rotation:
      if (kind == MotionKind::light_rotation) {
        double dir = rng.coin() ? 1.0 : -1.0;
        for (int f = 0; f < frames; ++f) tracks.env_yaw.push_back(dir * kTwoPi * f / frames);
      }
      break;

    case MotionKind::orbit: {
      Vec3 offset = initial.position - pivot;
      double rh = std::hypot(offset.x, offset.z);
      double az0 = std::atan2(offset.x, offset.z);
      double dir = rng.coin() ? 1.0 : -1.0;
      for (int f = 0; f < frames; ++f) {
        double az = az0 + dir * kTwoPi * f / frames;
        Vec3 eye = pivot + Vec3{rh * std::sin(az), offset.y, rh * std::cos(az)};
        tracks.camera[f] = {eye, look_at_rotation(eye, pivot)};
      }
      break;
    }

    case MotionKind::oscillation: {
      double distance = length(initial.position - pivot);
      Vec3 amplitude, phase, cycles;
      for (int a = 0; a < 3; ++a) {
        amplitude[a] = rng.uniform(0.25, 0.5) * config.oscillation_amplitude * distance;
        phase[a] = rng.uniform(0, kTwoPi);
        cycles[a] = rng.uniform_int(1, 2);
      }
      for (int f = 0; f < frames; ++f) {
        Vec3 eye = initial.position;
        for (int a = 0; a < 3; ++a)
          eye[a] += amplitude[a] * (std::sin(kTwoPi * cycles[a] * f / frames + phase[a]) - std::sin(phase[a]));
        tracks.camera[f] = {eye, look_at_rotation(eye, pivot)};
      }
      break;
    }

    case MotionKind::object_rotation:
    case MotionKind::object_translation: {
      // Work on a copy so each accepted track constrains the following ones.
      SceneDescription work = scene;
      for (auto& o : work.objects) o.track.clear();
      for (auto& p : work.primitives) p.track.clear();
      FrameBoxes fb = frame_boxes(work, meshes, frames);
      const double floor_y = ground_height(scene);
      const double limit = config.plane_half_extent;

      auto acceptable = [&](std::size_t index, const std::vector<Transform>& track) {
        auto mesh = meshes.get(work.objects[index]);
        std::vector<Aabb> boxes;
        for (int f = 0; f < frames; ++f) {
          Aabb box = aabb(*mesh, track[f]);
          if (box.min.y < floor_y - 1e-9) return false;
          if (std::abs(box.min.x) > limit || std::abs(box.max.x) > limit || std::abs(box.min.z) > limit ||
              std::abs(box.max.z) > limit)
            return false;
          if (contains(box, tracks.camera[f].position, kCameraClearance)) return false;
          for (std::size_t other = 0; other < fb.boxes.size(); ++other)
            if (other != index && overlaps(box, fb.boxes[other][f], config.gap)) return false;
          boxes.push_back(box);
        }
        fb.boxes[index] = std::move(boxes);
        return true;
      };

      for (std::size_t i = 0; i < work.objects.size(); ++i) {
        const Transform start = work.objects[i].transform;
        std::vector<Transform> accepted;
        if (kind == MotionKind::object_rotation) {
          Vec3 center = aabb(*meshes.get(work.objects[i]), start).center();
          double angle = (rng.coin() ? 1.0 : -1.0) * kTwoPi;
          for (int h = 0; h <= kMaxHalvings && accepted.empty(); ++h, angle *= 0.5) {
            std::vector<Transform> track;
            for (int f = 0; f < frames; ++f) {
              Mat3 spin = rotation_y(angle * f / frames);
              Vec3 rel = start.translation - center;
              Vec3 t = spin * Vec3{rel.x, 0, rel.z};
              track.push_back({{center.x + t.x, start.translation.y, center.z + t.z}, spin * start.rotation, start.scale});
            }
            if (acceptable(i, track)) accepted = std::move(track);
          }
        } else {
          double distance = rng.uniform(config.translation_min, config.translation_max);
          for (int h = 0; h <= kMaxHalvings && accepted.empty(); ++h, distance *= 0.5) {
            int tries = h == 0 ? config.retry_limit : std::max(1, config.retry_limit / 10);
            for (int attempt = 0; attempt < tries && accepted.empty(); ++attempt) {
              double heading = rng.uniform(0, kTwoPi);
              Vec3 step{std::cos(heading) * distance, 0, std::sin(heading) * distance};
              std::vector<Transform> track;
              for (int f = 0; f < frames; ++f) {
                Transform t = start;
                t.translation += step * (static_cast<double>(f) / (frames - 1));
                track.push_back(t);
              }
              if (acceptable(i, track)) accepted = std::move(track);
            }
          }
        }
        if (accepted.empty()) accepted.assign(frames, start);
        tracks.bodies[i] = accepted;
      }
      break;
    }
  }
  return tracks;
}

void apply_motion(SceneDescription& scene, const MotionTracks& tracks) {
  scene.motion = tracks.kind;
  scene.camera.poses = tracks.camera;
  scene.env.yaw_track = tracks.env_yaw;
  const std::size_t n_objects = scene.objects.size();
  for (const auto& [index, track] : tracks.bodies) {
    if (index < n_objects)
      scene.objects[index].track = track;
    else if (index - n_objects < scene.primitives.size())
      scene.primitives[index - n_objects].track = track;
    else
      throw IndexError("motion track for unknown body " + std::to_string(index));
  }
}

SceneDescription generate_clip(const GenConfig& config, std::uint64_t seed, MeshCache& meshes) {
  SceneDescription scene = generate_scene(config, seed, meshes);
  MotionKind kind = config.frames >= 2 ? sample_motion_kind(config, seed) : MotionKind::none;
  apply_motion(scene, generate_motion(kind, scene, config.frames, seed, config, meshes));
  return scene;
}

std::vector<std::string> check_safety(const SceneDescription& scene, MeshCache& meshes) {
  std::vector<std::string> findings;
  const int frames = std::max(1, scene.frame_count());
  auto all = bodies(scene);
  FrameBoxes fb = frame_boxes(scene, meshes, frames);
  for (int f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      const Aabb& a = fb.boxes[i][f];
      if (scene.ground && a.min.y < scene.ground->height - 1e-6)
        findings.push_back("frame " + std::to_string(f) + ": '" + all[i]->name + "' penetrates the plane");
      for (std::size_t j = i + 1; j < all.size(); ++j)
        if (overlaps(a, fb.boxes[j][f]))
          findings.push_back("frame " + std::to_string(f) + ": '" + all[i]->name + "' overlaps '" + all[j]->name +
                             "'");
    }
  }
  return findings;
}

}  // namespace drforge
