// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "drforge/config.hpp"
#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/parallel.hpp"
#include "drforge/radiometry.hpp"
#include "drforge/rng.hpp"

namespace drforge {

using json = nlohmann::json;

const std::vector<ChannelInfo>& clip_channels() {
  static const std::vector<ChannelInfo> channels{
      {"rgb_hdr", "exr", {"R", "G", "B"}},
      {"rgb_ldr", "png", {}},
      {"normal", "exr", {"normal.x", "normal.y", "normal.z"}},
      {"depth", "exr", {"depth.z"}},
      {"basecolor", "exr", {"basecolor.r", "basecolor.g", "basecolor.b"}},
      {"roughness", "exr", {"roughness.y"}},
      {"metallic", "exr", {"metallic.y"}},
      {"hit", "exr", {"hit.y"}},
      {"env", "exr", {"R", "G", "B"}},
      {"env_ldr", "png", {}},
      {"env_log", "exr", {"R", "G", "B"}},
      {"env_dir", "exr", {"dir.x", "dir.y", "dir.z"}},
  };
  return channels;
}

const ChannelInfo& channel_info(const std::string& name) {
  for (const auto& c : clip_channels())
    if (name == c.name) return c;
  throw FormatError("unknown clip channel '" + name + "'");
}

std::string frame_file_name(int frame, const char* extension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d.%s", frame, extension);
  return buf;
}

Image read_channel_file(const fs::path& path, const std::string& channel) {
  const ChannelInfo& info = channel_info(channel);
  if (std::string(info.extension) == "png") return read_png(path);
  return read_exr_channels(path, info.exr_names).image;
}

namespace {

fs::path channel_path(const fs::path& clip_dir, const std::string& channel, int frame) {
  return clip_dir / channel / frame_file_name(frame, channel_info(channel).extension);
}

void write_channel(const fs::path& clip_dir, const std::string& channel, int frame, const Image& image,
                   const std::map<std::string, double>& attributes = {}) {
  const ChannelInfo& info = channel_info(channel);
  fs::path path = channel_path(clip_dir, channel, frame);
  fs::create_directories(path.parent_path());
  if (std::string(info.extension) == "png")
    write_png(path, image);
  else
    write_exr(path, image, info.exr_names, attributes);
}

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ClipRecord record_from_json(const json& j) {
  ClipRecord r;
  r.id = j.at("id").get<std::string>();
  r.scene_file = j.at("scene").get<std::string>();
  r.frames = j.at("frames").get<int>();
  r.width = j.at("width").get<int>();
  r.height = j.at("height").get<int>();
  r.files = j.at("files").get<std::map<std::string, std::vector<std::string>>>();
  const json& env = j.at("env");
  r.env_source = env.at("source").get<std::string>();
  r.env_yaw = env.at("yaw").get<double>();
  r.env_flip = env.at("flip").get<bool>();
  r.env_scale = env.at("scale").get<double>();
  r.e_max = env.at("e_max").get<std::vector<double>>();
  if (const json& d = j.at("depth_range"); !d.is_null())
    r.depth_range = DepthRange{d.at("z_min").get<double>(), d.at("z_max").get<double>()};
  r.seed = j.at("seed").get<std::uint64_t>();
  r.motion = j.at("motion").get<std::string>();
  r.render_settings_digest = j.at("render_settings_digest").get<std::string>();
  return r;
}

json record_to_json(const ClipRecord& r) {
  json j{{"id", r.id},
         {"scene", r.scene_file},
         {"frames", r.frames},
         {"width", r.width},
         {"height", r.height},
         {"files", r.files},
         {"env",
          {{"source", r.env_source},
           {"yaw", r.env_yaw},
           {"flip", r.env_flip},
           {"scale", r.env_scale},
           {"e_max", r.e_max}}},
         {"depth_range", nullptr},
         {"seed", r.seed},
         {"motion", r.motion},
         {"render_settings_digest", r.render_settings_digest}};
  if (r.depth_range) j["depth_range"] = {{"z_min", r.depth_range->z_min}, {"z_max", r.depth_range->z_max}};
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Camera and G-buffer files
// ---------------------------------------------------------------------------

void save_clip_camera(const fs::path& path, const ClipCamera& camera) {
  json poses = json::array();
  for (const Pose& p : camera.track.poses)
    poses.push_back({{"position", vec_to_json(p.position)},
                     {"rotation", json::array({vec_to_json(p.rotation.x), vec_to_json(p.rotation.y),
                                               vec_to_json(p.rotation.z)})}});
  json j{{"vfov", camera.track.vfov}, {"width", camera.width}, {"height", camera.height}, {"poses", poses}};
  write_text_atomically(path, j.dump(2) + "\n");
}

ClipCamera load_clip_camera(const fs::path& path) {
  try {
    json j = json::parse(read_text(path));
    ClipCamera c;
    c.track.vfov = j.at("vfov").get<double>();
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    for (const json& p : j.at("poses")) {
      const json& r = p.at("rotation");
      if (!r.is_array() || r.size() != 3) throw FormatError("camera rotation must have 3 columns");
      c.track.poses.push_back({vec_from_json(p.at("position")),
                               Mat3{vec_from_json(r[0]), vec_from_json(r[1]), vec_from_json(r[2])}});
    }
    if (c.track.poses.empty() || c.width <= 0 || c.height <= 0)
      throw FormatError("camera has no poses or an invalid resolution");
    return c;
  } catch (const json::exception& e) {
    throw FormatError("camera " + path.string() + ": " + e.what());
  }
}

void save_gbuffer_frame(const fs::path& clip_dir, int frame, const GBuffer& gb) {
  if (!gb.depth_range) throw DomainError("save_gbuffer_frame: depth is not normalized");
  write_channel(clip_dir, "normal", frame, gb.normal);
  write_channel(clip_dir, "depth", frame, gb.depth,
                {{"z_min", gb.depth_range->z_min}, {"z_max", gb.depth_range->z_max}});
  write_channel(clip_dir, "basecolor", frame, gb.base_color);
  write_channel(clip_dir, "roughness", frame, gb.roughness);
  write_channel(clip_dir, "metallic", frame, gb.metallic);
  write_channel(clip_dir, "hit", frame, gb.hit);
}

GBuffer load_gbuffer_frame(const fs::path& clip_dir, int frame) {
  ExrImage depth = read_exr_channels(channel_path(clip_dir, "depth", frame), channel_info("depth").exr_names);
  auto zmin = depth.attributes.find("z_min");
  auto zmax = depth.attributes.find("z_max");
  if (zmin == depth.attributes.end() || zmax == depth.attributes.end())
    throw FormatError("depth file of frame " + std::to_string(frame) + " lacks the z_min / z_max attributes");
  GBuffer gb(depth.image.width, depth.image.height);
  gb.depth = std::move(depth.image);
  gb.depth_range = DepthRange{zmin->second, zmax->second};
  gb.normal = read_channel_file(channel_path(clip_dir, "normal", frame), "normal");
  gb.base_color = read_channel_file(channel_path(clip_dir, "basecolor", frame), "basecolor");
  gb.roughness = read_channel_file(channel_path(clip_dir, "roughness", frame), "roughness");
  gb.metallic = read_channel_file(channel_path(clip_dir, "metallic", frame), "metallic");
  gb.hit = read_channel_file(channel_path(clip_dir, "hit", frame), "hit");
  for (const Image* img : {&gb.normal, &gb.base_color, &gb.roughness, &gb.metallic, &gb.hit})
    if (img->width != gb.width || img->height != gb.height)
      throw FormatError("G-buffer channels of frame " + std::to_string(frame) + " differ in resolution");
  return gb;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

void check_manifest(const DatasetManifest& manifest) {
  std::set<std::string> ids;
  for (const auto& clip : manifest.clips)
    if (!ids.insert(clip.id).second) throw ValidationError("duplicate clip id '" + clip.id + "'");
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  check_manifest(manifest);
  json clips = json::array();
  for (const auto& c : manifest.clips) clips.push_back(record_to_json(c));
  json j{{"schema_version", manifest.schema_version}, {"config_digest", manifest.config_digest}, {"clips", clips}};
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  DatasetManifest m;
  try {
    json j = json::parse(text);
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != DatasetManifest::kSchemaVersion)
      throw FormatError("unknown manifest schema version " + std::to_string(m.schema_version));
    m.config_digest = j.at("config_digest").get<std::string>();
    for (const json& c : j.at("clips")) m.clips.push_back(record_from_json(c));
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  check_manifest(m);
  return m;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_text_atomically(path, manifest_to_json(manifest));
}

DatasetManifest read_manifest(const fs::path& path) { return manifest_from_json(read_text(path)); }

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::uint64_t clip_render_seed(std::uint64_t render_seed, std::uint64_t clip_seed) {
  return hash_key({render_seed, clip_seed});
}

ClipRecord render_clip(const ClipRecord& base, const fs::path& root, const RenderSettings& settings_in, int frames) {
  SceneDescription desc = load_scene_description(root / base.scene_file);
  const int scene_frames = desc.frame_count();
  if (frames <= 0) frames = scene_frames;
  if (frames > scene_frames)
    throw DomainError("render_clip: " + std::to_string(frames) + " frames requested but clip '" + base.id +
                      "' has " + std::to_string(scene_frames));
  desc.camera.poses.resize(frames);
  for (auto* list : {&desc.objects, &desc.primitives})
    for (auto& body : *list)
      if (!body.track.empty()) body.track.resize(frames);
  if (!desc.env.yaw_track.empty()) desc.env.yaw_track.resize(frames);

  RenderSettings settings = settings_in;
  settings.seed = clip_render_seed(settings_in.seed, desc.seed);
  settings.validate();
  const Scene scene = load_scene(desc);
  const fs::path clip_dir = root / base.id;
  fs::create_directories(clip_dir);

  ClipRecord record = base;
  record.frames = frames;
  record.width = settings.width;
  record.height = settings.height;
  record.env_source = desc.env.path;
  record.env_yaw = desc.env.yaw;
  record.env_flip = desc.env.flip;
  record.env_scale = desc.env.scale;
  record.seed = desc.seed;
  record.motion = to_string(desc.motion);
  record.e_max.clear();
  record.files.clear();

  save_clip_camera(clip_dir / "camera.json", {desc.camera, settings.width, settings.height});

  std::vector<GBuffer> gbuffers = render_gbuffer_clip(scene, settings);
  record.depth_range = gbuffers.front().depth_range;

  for (int f = 0; f < frames; ++f) {
    Image hdr = render_frame(scene, f, settings);
    write_channel(clip_dir, "rgb_hdr", f, hdr);
    write_channel(clip_dir, "rgb_ldr", f, tonemap_image(hdr, settings.tonemap));
    save_gbuffer_frame(clip_dir, f, gbuffers[f]);

    const EnvironmentMap env = env_at(scene, f);
    const LightingEncoding enc = encode_lighting(env, transpose(pose_at(desc.camera, f).rotation));
    fs::path env_path = channel_path(clip_dir, "env", f);
    fs::create_directories(env_path.parent_path());
    save_environment(env_path, env);
    Image ldr = enc.e_ldr;
    for (float& v : ldr.data) v = static_cast<float>(srgb_encode(v));
    write_channel(clip_dir, "env_ldr", f, ldr);
    write_channel(clip_dir, "env_log", f, enc.e_log, {{"e_max", enc.e_max}});
    write_channel(clip_dir, "env_dir", f, enc.e_dir);
    record.e_max.push_back(enc.e_max);
  }
  for (const auto& c : clip_channels())
    for (int f = 0; f < frames; ++f)
      record.files[c.name].push_back((fs::path(base.id) / c.name / frame_file_name(f, c.extension)).generic_string());
  record.render_settings_digest = render_settings_digest(settings);
  return record;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class ClipValidator {
 public:
  ClipValidator(const ClipRecord& record, const fs::path& root) : record_(record), root_(root) {}

  std::vector<Finding> run() {
    if (!record_.rendered()) {
      add("", "clip not rendered");
      return findings_;
    }
    if (record_.frames <= 0 || record_.width <= 0 || record_.height <= 0) add("", "invalid frame count or resolution");
    if (!fs::exists(root_ / record_.scene_file)) add(record_.scene_file, "missing file");
    if (!record_.depth_range) add("", "missing depth range");
    if (static_cast<int>(record_.e_max.size()) != record_.frames) add("", "e_max count does not match frame count");
    for (double e : record_.e_max)
      if (!(e > 0)) add("", "e_max not positive");

    for (const auto& c : clip_channels()) {
      auto it = record_.files.find(c.name);
      if (it == record_.files.end()) {
        add(c.name, "missing channel");
        continue;
      }
      if (static_cast<int>(it->second.size()) != record_.frames) add(c.name, "file count does not match frame count");
      for (std::size_t f = 0; f < it->second.size(); ++f) check_file(c, it->second[f], static_cast<int>(f));
    }
    return findings_;
  }

 private:
  void add(const std::string& file, const std::string& message) { findings_.push_back({record_.id, file, message}); }

  void check_file(const ChannelInfo& c, const std::string& rel, int frame) {
    const fs::path path = root_ / rel;
    if (!fs::exists(path)) {
      add(rel, "missing file");
      return;
    }
    try {
      if (std::string(c.extension) == "png") {
        Image img = read_png(path);
        check_png(c, rel, img);
        return;
      }
      ExrImage exr = read_exr_channels(path, c.exr_names);
      check_exr(c, rel, exr, frame);
    } catch (const Error& e) {
      add(rel, std::string("unreadable file: ") + e.what());
    }
  }

  bool check_shape(const std::string& rel, const Image& img, int w, int h) {
    if (img.width != w || img.height != h) {
      add(rel, "shape mismatch");
      return false;
    }
    return true;
  }

  void check_png(const ChannelInfo& c, const std::string& rel, const Image& img) {
    if (img.channels != 3) add(rel, "shape mismatch");
    if (std::string(c.name) == "rgb_ldr")
      check_shape(rel, img, record_.width, record_.height);
    else if (img.width != 2 * img.height)
      add(rel, "shape mismatch");
  }

  void check_range(const std::string& rel, const Image& img, double lo, double hi, const char* message) {
    for (float v : img.data)
      if (!(v >= lo && v <= hi)) {
        add(rel, message);
        return;
      }
  }

  void check_exr(const ChannelInfo& c, const std::string& rel, const ExrImage& exr, int frame) {
    const std::string name = c.name;
    const Image& img = exr.image;
    for (float v : img.data)
      if (!std::isfinite(v)) {
        add(rel, "non-finite value");
        return;
      }
    if (name.rfind("env", 0) == 0) {
      if (img.width != 2 * img.height) add(rel, "shape mismatch");
      if (name == "env") check_range(rel, img, 0.0, INFINITY, "negative radiance");
      if (name == "env_log") {
        check_range(rel, img, 0.0, 1.0, "e_log out of range");
        auto it = exr.attributes.find("e_max");
        if (it == exr.attributes.end() || !(it->second > 0))
          add(rel, "e_max not positive");
        else if (frame < static_cast<int>(record_.e_max.size()) &&
                 std::abs(it->second - record_.e_max[frame]) > 1e-9 * std::max(1.0, it->second))
          add(rel, "e_max differs from manifest");
      }
      if (name == "env_dir")
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
          double n = std::sqrt(sqr(img.data[3 * i]) + sqr(img.data[3 * i + 1]) + sqr(img.data[3 * i + 2]));
          if (std::abs(n - 1.0) > 1e-5) {
            add(rel, "e_dir not unit");
            break;
          }
        }
      return;
    }
    if (!check_shape(rel, img, record_.width, record_.height)) return;
    if (name == "rgb_hdr") check_range(rel, img, 0.0, INFINITY, "negative radiance");
    if (name == "depth") {
      check_range(rel, img, -1.0, 1.0, "depth out of range");
      if (!exr.attributes.count("z_min") || !exr.attributes.count("z_max")) add(rel, "missing depth range");
    }
    if (name == "basecolor" || name == "roughness" || name == "metallic")
      check_range(rel, img, 0.0, 1.0, "material out of range");
    if (name == "hit")
      for (float v : img.data)
        if (v != 0.0f && v != 1.0f) {
          add(rel, "hit not binary");
          break;
        }
    if (name == "normal") check_normals(rel, img, frame);
  }

  void check_normals(const std::string& rel, const Image& normal, int frame) {
    Image hit;
    try {
      hit = read_channel_file(root_ / record_.files.at("hit").at(frame), "hit");
    } catch (const std::exception&) {
      return;  // the hit file itself is reported
    }
    if (hit.width != normal.width || hit.height != normal.height) return;
    for (int y = 0; y < normal.height; ++y)
      for (int x = 0; x < normal.width; ++x) {
        double n = length(Vec3{normal.at(x, y, 0), normal.at(x, y, 1), normal.at(x, y, 2)});
        bool ok = hit.at(x, y) > 0.5f ? std::abs(n - 1.0) <= 1e-4 : n == 0.0;
        if (!ok) {
          add(rel, hit.at(x, y) > 0.5f ? "normal not unit" : "miss normal not zero");
          return;
        }
      }
  }

  const ClipRecord& record_;
  fs::path root_;
  std::vector<Finding> findings_;
};

}  // namespace

std::vector<Finding> validate_clip(const ClipRecord& record, const fs::path& root) {
  return ClipValidator(record, root).run();
}

std::vector<Finding> validate_dataset(const DatasetManifest& manifest, const fs::path& root, int threads) {
  std::vector<std::vector<Finding>> per_clip(manifest.clips.size());
  parallel_for(static_cast<int>(manifest.clips.size()), threads,
               [&](int i) { per_clip[i] = validate_clip(manifest.clips[i], root); });
  std::vector<Finding> all;
  for (auto& f : per_clip) all.insert(all.end(), f.begin(), f.end());
  return all;
}

}  // namespace drforge
