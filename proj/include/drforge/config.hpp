// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

#include "drforge/pathtracer.hpp"
#include "drforge/scenegen.hpp"

namespace drforge {

// Resolved pipeline configuration, layered as defaults <- file <- flags.
struct PipelineConfig {
  // generator
  GenConfig gen;
  std::string asset_pool;
  std::string texture_pool;
  std::string env_pool;
  // renderer; resolution and frame count come from the generator section
  RenderSettings render;
  // baselines
  double edge_ratio = 1.2;
  int prefilter_levels = 6;
  // seed policy: clip i uses seed_base + i
  std::uint64_t seed_base = 0;

  // Desk-scale defaults: 16 spp, 128x128, 4 frames.
  static PipelineConfig desk();
  // 256 spp, 512x512, 24 frames.
  void apply_full_scale();

  // Render settings with width, height taken from the generator resolution.
  RenderSettings render_settings() const;
  void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& config);
// Overrides every field present in `j`; unknown keys are a FormatError.
void apply_config_json(PipelineConfig& config, const nlohmann::json& j);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

// Hex SHA-256 of the canonical JSON of everything that affects outputs
// (thread count excluded).
std::string config_digest(const PipelineConfig& config);
std::string render_settings_digest(const RenderSettings& settings);
std::string sha256_hex(const std::string& data);

}  // namespace drforge
