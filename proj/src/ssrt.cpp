// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/baselines.hpp"
#include "drforge/error.hpp"
#include "drforge/parallel.hpp"

namespace drforge {

DepthMesh extract_depth_mesh(const GBuffer& gb, const Camera& camera, double edge_ratio) {
  if (!gb.depth_range) throw FormatError("extract_depth_mesh: G-buffer has no depth range metadata");
  if (camera.width != gb.width || camera.height != gb.height)
    throw DomainError("extract_depth_mesh: camera resolution does not match the G-buffer");
  if (!(edge_ratio >= 1.0)) throw DomainError("extract_depth_mesh: edge ratio must be >= 1");

  DepthMesh mesh;
  mesh.width = gb.width;
  mesh.height = gb.height;
  mesh.vertex_of_pixel.assign(gb.pixel_count(), -1);
  std::vector<double> depth;
  for (int y = 0; y < gb.height; ++y)
    for (int x = 0; x < gb.width; ++x) {
      if (!gb.is_hit(x, y)) continue;
      double z = denormalize_depth(gb.depth.at(x, y), *gb.depth_range);
      mesh.vertex_of_pixel[static_cast<std::size_t>(y) * gb.width + x] = static_cast<int>(mesh.positions.size());
      mesh.positions.push_back(camera.unproject(x + 0.5, y + 0.5, z));
      mesh.normals.push_back(normalize(Vec3{gb.normal.at(x, y, 0), gb.normal.at(x, y, 1), gb.normal.at(x, y, 2)}));
      mesh.materials.push_back(gb.material(x, y));
      depth.push_back(z);
    }

  auto add = [&](int a, int b, int c) {
    if (a < 0 || b < 0 || c < 0) return;
    double lo = std::min({depth[a], depth[b], depth[c]});
    double hi = std::max({depth[a], depth[b], depth[c]});
    if (!(lo > 0) || hi / lo > edge_ratio) {
      ++mesh.dropped_triangles;
      return;
    }
    mesh.triangles.push_back({a, b, c});
  };
  for (int y = 0; y + 1 < gb.height; ++y)
    for (int x = 0; x + 1 < gb.width; ++x) {
      int v00 = mesh.vertex(x, y), v10 = mesh.vertex(x + 1, y);
      int v01 = mesh.vertex(x, y + 1), v11 = mesh.vertex(x + 1, y + 1);
      add(v00, v01, v10);
      add(v10, v01, v11);
    }
  return mesh;
}

Geometry depth_mesh_geometry(const DepthMesh& mesh, const Camera& camera) {
  Geometry g;
  g.positions.reserve(mesh.positions.size());
  for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
    g.positions.push_back(camera.to_world(mesh.positions[i]));
    g.normals.push_back(normalize(camera.pose.rotation * mesh.normals[i]));
    g.uvs.push_back({});
  }
  g.triangles = mesh.triangles;
  g.material_ids.assign(mesh.triangles.size(), 0);
  g.vertex_materials = mesh.materials;
  return g;
}

Image ssrt_render(const GBuffer& gb, const Camera& camera, const EnvironmentMap& env, const RenderSettings& settings,
                  double edge_ratio, int frame) {
  settings.validate();
  DepthMesh mesh = extract_depth_mesh(gb, camera, edge_ratio);
  Geometry geometry = depth_mesh_geometry(mesh, camera);
  PathIntegrator integrator(geometry, env, settings);
  Image out(gb.width, gb.height, 3);
  parallel_for(gb.height, settings.threads, [&](int y) {
    for (int x = 0; x < gb.width; ++x) {
      Ray ray = camera.generate_ray(x + 0.5, y + 0.5);
      int v = mesh.vertex(x, y);
      if (v < 0) {
        out.set_rgb(x, y, sample_env(integrator.env(), ray.direction));
        continue;
      }
      SurfacePoint sp;
      sp.position = geometry.positions[v];
      sp.geometric_normal = geometry.normals[v];
      sp.shading_normal = geometry.normals[v];
      sp.material = mesh.materials[v];
      Vec3 wo = -ray.direction;
      Rgb sum;
      for (int s = 0; s < settings.spp; ++s) {
        Pcg32 rng = sample_stream(settings.seed, frame, x, y, s);
        sum += integrator.shade_surface(sp, wo, rng);
      }
      out.set_rgb(x, y, sum / settings.spp);
    }
  });
  return out;
}

}  // namespace drforge
