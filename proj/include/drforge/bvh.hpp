// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "drforge/math.hpp"
#include "drforge/scene.hpp"

namespace drforge {

// Flattened world-space triangle soup with per-triangle material ids. When
// vertex_materials is non-empty it overrides `materials` and holds one
// material sample per vertex, interpolated across each triangle.
struct Geometry {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> material_ids;  // per triangle
  std::vector<ShadingMaterial> materials;
  std::vector<MaterialSample> vertex_materials;

  std::size_t triangle_count() const { return triangles.size(); }
  // Appends `mesh` transformed to world space, shaded with `material_id`.
  void append(const Mesh& mesh, const Transform& transform, int material_id);
};

struct Hit {
  double t = INFINITY;
  int triangle = -1;
  double b1 = 0, b2 = 0;  // barycentrics of vertices 1 and 2

  bool valid() const { return triangle >= 0; }
};

// Binned-SAH bounding volume hierarchy over a Geometry. The geometry must
// outlive the BVH and stay unmodified.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(const Geometry& geometry);

  // Closest hit in (ray.tmin, ray.tmax).
  bool intersect(const Ray& ray, Hit& hit) const;
  // Any hit in (ray.tmin, ray.tmax).
  bool occluded(const Ray& ray) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Aabb bounds;
    int first = 0;  // first primitive (leaf) or right child (interior)
    int count = 0;  // primitive count; 0 marks an interior node
  };

  int build(int begin, int end, std::vector<Aabb>& boxes, std::vector<Vec3>& centers);
  template <bool AnyHit>
  bool traverse(const Ray& ray, Hit* hit) const;

  const Geometry* geometry_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<int> order_;  // primitive indices in leaf order
};

// Shading data at a ray hit. Normals are not flipped here.
struct SurfacePoint {
  Vec3 position;
  Vec3 geometric_normal;
  Vec3 shading_normal;
  Vec2 uv;
  MaterialSample material;
};

SurfacePoint surface_point(const Geometry& geometry, const Ray& ray, const Hit& hit);

}  // namespace drforge
