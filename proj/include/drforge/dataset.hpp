// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drforge/image.hpp"
#include "drforge/pathtracer.hpp"
#include "drforge/scene.hpp"

namespace drforge {

namespace fs = std::filesystem;

// Per-frame channels of a rendered clip. Every channel lives in its own
// directory under the clip directory as frame_<NNNN>.<ext>.
struct ChannelInfo {
  const char* name;
  const char* extension;               // "exr" or "png"
  std::vector<std::string> exr_names;  // channel names inside the EXR; empty for PNG
};

const std::vector<ChannelInfo>& clip_channels();
const ChannelInfo& channel_info(const std::string& name);
std::string frame_file_name(int frame, const char* extension);
// Reads one channel file into an image with the channel's layout.
Image read_channel_file(const fs::path& path, const std::string& channel);

// Camera of a rendered clip, stored as camera.json next to the buffers.
struct ClipCamera {
  CameraTrack track;
  int width = 0;
  int height = 0;

  Camera at(int frame) const { return {pose_at(track, frame), track.vfov, width, height}; }
  friend bool operator==(const ClipCamera&, const ClipCamera&) = default;
};

void save_clip_camera(const fs::path& path, const ClipCamera& camera);
ClipCamera load_clip_camera(const fs::path& path);

// G-buffer of one frame. The depth file carries the clip depth range as the
// z_min / z_max header attributes.
void save_gbuffer_frame(const fs::path& clip_dir, int frame, const GBuffer& gbuffer);
GBuffer load_gbuffer_frame(const fs::path& clip_dir, int frame);

struct ClipRecord {
  std::string id;
  std::string scene_file;  // relative to the dataset root
  int frames = 0;
  int width = 0;
  int height = 0;
  std::map<std::string, std::vector<std::string>> files;  // channel -> per-frame path, root relative
  std::string env_source;
  double env_yaw = 0.0;
  bool env_flip = false;
  double env_scale = 1.0;
  std::vector<double> e_max;  // per frame
  std::optional<DepthRange> depth_range;
  std::uint64_t seed = 0;
  std::string motion = "none";
  std::string render_settings_digest;  // empty until rendered

  bool rendered() const { return !render_settings_digest.empty(); }
  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

struct DatasetManifest {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  std::string config_digest;
  std::vector<ClipRecord> clips;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

// Throws ValidationError on duplicate clip ids.
void check_manifest(const DatasetManifest& manifest);
std::string manifest_to_json(const DatasetManifest& manifest);
// FormatError on malformed JSON or an unknown schema version.
DatasetManifest manifest_from_json(const std::string& text);
void write_manifest(const DatasetManifest& manifest, const fs::path& path);
DatasetManifest read_manifest(const fs::path& path);

// Renderer seed of a clip, derived from the configured base seed and the
// clip's generator seed.
std::uint64_t clip_render_seed(std::uint64_t render_seed, std::uint64_t clip_seed);

// Renders the first `frames` frames (all when <= 0) of the clip scene into
// root / record.id and returns the completed record. `settings` carries the
// resolution; its seed is replaced by clip_render_seed.
ClipRecord render_clip(const ClipRecord& record, const fs::path& root, const RenderSettings& settings,
                       int frames = 0);

struct Finding {
  std::string clip;
  std::string file;
  std::string message;
};

// Structural checks of a rendered clip; problems are reported, never thrown.
std::vector<Finding> validate_clip(const ClipRecord& record, const fs::path& root);
std::vector<Finding> validate_dataset(const DatasetManifest& manifest, const fs::path& root, int threads = 0);

}  // namespace drforge
