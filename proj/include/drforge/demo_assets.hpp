// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drforge/radiometry.hpp"
#include "drforge/scene.hpp"

namespace drforge {

// Small procedural asset, texture and environment pools so the pipeline runs
// without downloaded content.

Mesh make_torus(double major_radius, double minor_radius, int segments = 48, int rings = 24);
// Surface of revolution about +Y through (radius, height) profile points.
Mesh make_lathe(const std::vector<Vec2>& profile, int segments = 48);
// Sphere with smooth low-frequency radial displacement.
Mesh make_blob(std::uint64_t seed, double radius = 0.5, int segments = 48, int rings = 24);
// Seat on four legs.
Mesh make_stool();

// Appends `part` to `mesh` translated by `offset`.
void append_mesh(Mesh& mesh, const Mesh& part, const Vec3& offset = {});
// Area-weighted smooth vertex normals.
void recompute_normals(Mesh& mesh);

std::vector<std::string> demo_environment_names();
// Equirectangular demo lighting of the given width (height is width / 2).
EnvironmentMap demo_environment(const std::string& name, int width = 256);

struct DemoPools {
  std::filesystem::path assets;
  std::filesystem::path textures;
  std::filesystem::path envs;
};

// Writes the pools under root/{assets,textures,envs}; deterministic.
DemoPools write_demo_assets(const std::filesystem::path& root, int env_width = 256);

}  // namespace drforge
