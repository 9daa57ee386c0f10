// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "drforge/bvh.hpp"
#include "drforge/math.hpp"
#include "drforge/pathtracer.hpp"
#include "drforge/scene.hpp"

namespace drforge::testing {

namespace fs = std::filesystem;

inline ShadingMaterial constant_material(const Rgb& base_color, double roughness, double metallic) {
  ShadingMaterial m;
  m.desc.base_color = base_color;
  m.desc.roughness = roughness;
  m.desc.metallic = metallic;
  return m;
}

inline MaterialSample material_sample(const Rgb& base_color, double roughness, double metallic) {
  MaterialSample m;
  m.base_color = base_color;
  m.roughness = roughness;
  m.metallic = metallic;
  return m;
}

// Appends `mesh` under `transform` with its own constant material.
inline void add_mesh(Geometry& g, const Mesh& mesh, const Transform& transform, const ShadingMaterial& material) {
  g.materials.push_back(material);
  g.append(mesh, transform, static_cast<int>(g.materials.size()) - 1);
}

// Axis-aligned rectangle in the plane z = `z`, facing +Z, spanning
// [x0, x1] x [y0, y1], with uv covering [0,1]^2.
inline Mesh make_panel(double x0, double x1, double y0, double y1, double z) {
  Mesh m;
  m.positions = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  m.normals.assign(4, Vec3{0, 0, 1});
  m.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

inline Camera look_camera(const Vec3& from, const Vec3& to, double vfov_deg, int width, int height) {
  Camera c;
  c.pose.position = from;
  c.pose.rotation = look_at_rotation(from, to);
  c.vfov = radians(vfov_deg);
  c.width = width;
  c.height = height;
  return c;
}

// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("drforge_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline double mean_abs_difference(const Image& a, const Image& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
  return s / a.data.size();
}

}  // namespace drforge::testing
