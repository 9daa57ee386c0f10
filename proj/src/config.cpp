// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/config.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"

namespace drforge {

using json = nlohmann::json;

namespace {

// Reads `key` from `j` into `out` when present, rejecting type mismatches.
template <typename T>
void read_field(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* section) {
  if (!j.is_object()) throw FormatError(std::string("config section '") + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw FormatError(std::string("unknown config key '") + section + "." + key + "'");
  }
}

}  // namespace

PipelineConfig PipelineConfig::desk() {
  PipelineConfig c;
  c.gen.frames = 4;
  c.gen.resolution = 128;
  c.render.spp = 16;
  return c;
}

void PipelineConfig::apply_full_scale() {
  gen.frames = 24;
  gen.resolution = 512;
  render.spp = 256;
}

RenderSettings PipelineConfig::render_settings() const {
  RenderSettings s = render;
  s.width = gen.resolution;
  s.height = gen.resolution;
  return s;
}

void PipelineConfig::validate() const {
  gen.validate();
  render_settings().validate();
  if (!(edge_ratio >= 1.0)) throw DomainError("config: edge_ratio must be >= 1");
  if (prefilter_levels < 1) throw DomainError("config: prefilter_levels must be >= 1");
}

json config_to_json(const PipelineConfig& c) {
  const GenConfig& g = c.gen;
  json weights;
  for (int i = 0; i < kMotionKindCount; ++i) weights[to_string(kMotionKinds[i])] = g.motion_weights[i];
  return {
      {"generator",
       {{"asset_pool", c.asset_pool},
        {"texture_pool", c.texture_pool},
        {"env_pool", c.env_pool},
        {"max_objects", g.max_objects},
        {"max_primitives", g.max_primitives},
        {"plane_half_extent", g.plane_half_extent},
        {"placement_half_extent", g.placement_half_extent},
        {"object_size", {g.object_size_min, g.object_size_max}},
        {"primitive_size", {g.primitive_size_min, g.primitive_size_max}},
        {"primitive_texture_probability", g.primitive_texture_probability},
        {"texture_repeat", {g.texture_repeat_min, g.texture_repeat_max}},
        {"ground_repeat", g.ground_repeat},
        {"camera_distance", {g.camera_distance_min, g.camera_distance_max}},
        {"elevation_deg", {g.elevation_min_deg, g.elevation_max_deg}},
        {"vfov_deg", g.vfov_deg},
        {"env_scale", {g.env_scale_min, g.env_scale_max}},
        {"oscillation_amplitude", g.oscillation_amplitude},
        {"translation", {g.translation_min, g.translation_max}},
        {"motion_weights", weights},
        {"frames", g.frames},
        {"resolution", g.resolution},
        {"retry_limit", g.retry_limit},
        {"gap", g.gap}}},
      {"renderer",
       {{"spp", c.render.spp},
        {"max_bounces", c.render.max_bounces},
        {"seed", c.render.seed},
        {"tonemap", to_string(c.render.tonemap)},
        {"firefly_clamp", c.render.firefly_clamp}}},
      {"baselines",
       {{"edge_ratio", c.edge_ratio}, {"prefilter_levels", c.prefilter_levels}}},
      {"metrics", {{"scale_policy", "per_image"}, {"render_space", "ldr"}}},
      {"seed_base", c.seed_base},
  };
}

void apply_config_json(PipelineConfig& c, const json& j) {
  reject_unknown(j, {"generator", "renderer", "baselines", "metrics", "seed_base"}, "root");
  auto range = [](const json& s, const char* key, double& lo, double& hi) {
    auto it = s.find(key);
    if (it == s.end()) return;
    if (!it->is_array() || it->size() != 2) throw FormatError(std::string("config field '") + key + "' must be [min, max]");
    lo = (*it)[0].get<double>();
    hi = (*it)[1].get<double>();
  };
  if (auto it = j.find("generator"); it != j.end()) {
    const json& s = *it;
    reject_unknown(s,
                   {"asset_pool", "texture_pool", "env_pool", "max_objects", "max_primitives", "plane_half_extent",
                    "placement_half_extent", "object_size", "primitive_size", "primitive_texture_probability",
                    "texture_repeat", "ground_repeat", "camera_distance", "elevation_deg", "vfov_deg", "env_scale",
                    "oscillation_amplitude", "translation", "motion_weights", "frames", "resolution", "retry_limit",
                    "gap"},
                   "generator");
    GenConfig& g = c.gen;
    read_field(s, "asset_pool", c.asset_pool);
    read_field(s, "texture_pool", c.texture_pool);
    read_field(s, "env_pool", c.env_pool);
    read_field(s, "max_objects", g.max_objects);
    read_field(s, "max_primitives", g.max_primitives);
    read_field(s, "plane_half_extent", g.plane_half_extent);
    read_field(s, "placement_half_extent", g.placement_half_extent);
    range(s, "object_size", g.object_size_min, g.object_size_max);
    range(s, "primitive_size", g.primitive_size_min, g.primitive_size_max);
    read_field(s, "primitive_texture_probability", g.primitive_texture_probability);
    range(s, "texture_repeat", g.texture_repeat_min, g.texture_repeat_max);
    read_field(s, "ground_repeat", g.ground_repeat);
    range(s, "camera_distance", g.camera_distance_min, g.camera_distance_max);
    range(s, "elevation_deg", g.elevation_min_deg, g.elevation_max_deg);
    read_field(s, "vfov_deg", g.vfov_deg);
    range(s, "env_scale", g.env_scale_min, g.env_scale_max);
    read_field(s, "oscillation_amplitude", g.oscillation_amplitude);
    range(s, "translation", g.translation_min, g.translation_max);
    if (auto w = s.find("motion_weights"); w != s.end()) {
      if (!w->is_object()) throw FormatError("config field 'motion_weights' must be an object");
      for (const auto& [key, value] : w->items()) {
        MotionKind kind = motion_kind_from_string(key);
        bool found = false;
        for (int i = 0; i < kMotionKindCount; ++i)
          if (kMotionKinds[i] == kind) {
            g.motion_weights[i] = value.get<double>();
            found = true;
          }
        if (!found) throw FormatError("motion weight for non-motion kind '" + key + "'");
      }
    }
    read_field(s, "frames", g.frames);
    read_field(s, "resolution", g.resolution);
    read_field(s, "retry_limit", g.retry_limit);
    read_field(s, "gap", g.gap);
  }
  if (auto it = j.find("renderer"); it != j.end()) {
    const json& s = *it;
    reject_unknown(s, {"spp", "max_bounces", "seed", "tonemap", "firefly_clamp"}, "renderer");
    read_field(s, "spp", c.render.spp);
    read_field(s, "max_bounces", c.render.max_bounces);
    read_field(s, "seed", c.render.seed);
    read_field(s, "firefly_clamp", c.render.firefly_clamp);
    if (auto t = s.find("tonemap"); t != s.end()) c.render.tonemap = tonemap_from_string(t->get<std::string>());
  }
  if (auto it = j.find("baselines"); it != j.end()) {
    const json& s = *it;
    reject_unknown(s, {"edge_ratio", "prefilter_levels"}, "baselines");
    read_field(s, "edge_ratio", c.edge_ratio);
    read_field(s, "prefilter_levels", c.prefilter_levels);
  }
  if (auto it = j.find("metrics"); it != j.end()) {
    reject_unknown(*it, {"scale_policy", "render_space"}, "metrics");
    if (it->value("scale_policy", "per_image") != "per_image")
      throw FormatError("config: only the per_image scale policy is supported");
    if (it->value("render_space", "ldr") != "ldr") throw FormatError("config: renders are evaluated in ldr space");
  }
  read_field(j, "seed_base", c.seed_base);
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  apply_config_json(config, j);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string config_digest(const PipelineConfig& config) { return sha256_hex(config_to_json(config).dump()); }

std::string render_settings_digest(const RenderSettings& s) {
  json j{{"width", s.width},           {"height", s.height},
         {"spp", s.spp},               {"max_bounces", s.max_bounces},
         {"seed", s.seed},             {"tonemap", to_string(s.tonemap)},
         {"firefly_clamp", s.firefly_clamp}};
  return sha256_hex(j.dump());
}

}  // namespace drforge
