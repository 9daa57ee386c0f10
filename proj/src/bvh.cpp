// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/bvh.hpp"

#include <algorithm>
#include <numeric>

#include "drforge/error.hpp"

namespace drforge {

namespace {

constexpr int kBins = 16;
constexpr int kLeafSize = 4;

double surface_area(const Aabb& b) {
  if (b.empty()) return 0.0;
  Vec3 e = b.extent();
  return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
}

// Slab test against the ray segment (tmin, tmax).
bool hit_box(const Aabb& b, const Vec3& origin, const Vec3& inv_dir, double tmin, double tmax) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (b.min[a] - origin[a]) * inv_dir[a];
    double t1 = (b.max[a] - origin[a]) * inv_dir[a];
    if (inv_dir[a] < 0) std::swap(t0, t1);
    // NaN from 0 * inf compares false and leaves the interval untouched.
    if (t0 > tmin) tmin = t0;
    if (t1 < tmax) tmax = t1;
    if (tmax < tmin) return false;
  }
  return true;
}

// Moller-Trumbore; returns t and the barycentrics of vertices 1 and 2.
bool hit_triangle(const Ray& ray, const Vec3& p0, const Vec3& p1, const Vec3& p2, double tmin, double tmax,
                  double& t, double& b1, double& b2) {
  Vec3 e1 = p1 - p0, e2 = p2 - p0;
  Vec3 pv = cross(ray.direction, e2);
  double det = dot(e1, pv);
  if (det == 0.0) return false;
  double inv = 1.0 / det;
  Vec3 tv = ray.origin - p0;
  double u = dot(tv, pv) * inv;
  if (u < 0.0 || u > 1.0) return false;
  Vec3 qv = cross(tv, e1);
  double v = dot(ray.direction, qv) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  double tt = dot(e2, qv) * inv;
  if (!(tt > tmin && tt < tmax)) return false;
  t = tt;
  b1 = u;
  b2 = v;
  return true;
}

}  // namespace

void Geometry::append(const Mesh& mesh, const Transform& transform, int material_id) {
  const int base = static_cast<int>(positions.size());
  for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
    positions.push_back(transform.apply_point(mesh.positions[i]));
    normals.push_back(i < mesh.normals.size() ? transform.apply_normal(mesh.normals[i]) : Vec3{});
    uvs.push_back(i < mesh.uvs.size() ? mesh.uvs[i] : Vec2{});
  }
  for (const auto& tri : mesh.triangles) {
    triangles.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
    material_ids.push_back(material_id);
  }
}

Bvh::Bvh(const Geometry& geometry) : geometry_(&geometry) {
  const int n = static_cast<int>(geometry.triangles.size());
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centers(n);
  for (int i = 0; i < n; ++i) {
    for (int k : geometry.triangles[i]) boxes[i].expand(geometry.positions[k]);
    centers[i] = boxes[i].center();
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(std::max(1, 2 * n / kLeafSize + 1));
  if (n > 0) build(0, n, boxes, centers);
}

int Bvh::build(int begin, int end, std::vector<Aabb>& boxes, std::vector<Vec3>& centers) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb bounds, centroid_bounds;
  for (int i = begin; i < end; ++i) {
    bounds.expand(boxes[order_[i]]);
    centroid_bounds.expand(centers[order_[i]]);
  }
  nodes_[index].bounds = bounds;
  const int count = end - begin;

  auto make_leaf = [&] {
    nodes_[index].first = begin;
    nodes_[index].count = count;
    return index;
  };
  if (count <= kLeafSize) return make_leaf();

  // Pick the axis and bin boundary with the lowest surface area cost.
  int best_axis = -1, best_split = 0;
  double best_cost = INFINITY;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = centroid_bounds.min[axis], hi = centroid_bounds.max[axis];
    if (!(hi > lo)) continue;
    Aabb bin_box[kBins];
    int bin_count[kBins] = {};
    double scale = kBins / (hi - lo);
    for (int i = begin; i < end; ++i) {
      int b = std::min(kBins - 1, static_cast<int>((centers[order_[i]][axis] - lo) * scale));
      bin_box[b].expand(boxes[order_[i]]);
      ++bin_count[b];
    }
    double right_area[kBins];
    int right_count[kBins];
    Aabb acc;
    int cnt = 0;
    for (int b = kBins - 1; b > 0; --b) {
      acc.expand(bin_box[b]);
      cnt += bin_count[b];
      right_area[b] = surface_area(acc);
      right_count[b] = cnt;
    }
    acc = Aabb{};
    cnt = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      acc.expand(bin_box[b]);
      cnt += bin_count[b];
      if (cnt == 0 || right_count[b + 1] == 0) continue;
      double cost = surface_area(acc) * cnt + right_area[b + 1] * right_count[b + 1];
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_split = b + 1;
      }
    }
  }

  int mid;
  if (best_axis < 0) {
    if (count <= 2 * kLeafSize) return make_leaf();
    mid = begin + count / 2;  // coincident centroids: split evenly
  } else {
    double leaf_cost = surface_area(bounds) * count;
    if (count <= 2 * kLeafSize && best_cost >= leaf_cost) return make_leaf();
    double lo = centroid_bounds.min[best_axis];
    double scale = kBins / (centroid_bounds.max[best_axis] - lo);
    auto it = std::partition(order_.begin() + begin, order_.begin() + end, [&](int prim) {
      int b = std::min(kBins - 1, static_cast<int>((centers[prim][best_axis] - lo) * scale));
      return b < best_split;
    });
    mid = static_cast<int>(it - order_.begin());
    if (mid == begin || mid == end) mid = begin + count / 2;
  }

  build(begin, mid, boxes, centers);
  int right = build(mid, end, boxes, centers);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

template <bool AnyHit>
bool Bvh::traverse(const Ray& ray, Hit* hit) const {
  if (nodes_.empty()) return false;
  const Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
  double tmax = ray.tmax;
  bool found = false;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  const auto& pos = geometry_->positions;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.bounds, ray.origin, inv_dir, ray.tmin, tmax)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int prim = order_[i];
        const auto& tri = geometry_->triangles[prim];
        double t, b1, b2;
        if (hit_triangle(ray, pos[tri[0]], pos[tri[1]], pos[tri[2]], ray.tmin, tmax, t, b1, b2)) {
          if constexpr (AnyHit) return true;
          found = true;
          tmax = t;
          hit->t = t;
          hit->triangle = prim;
          hit->b1 = b1;
          hit->b2 = b2;
        }
      }
    } else {
      const int self = static_cast<int>(&node - nodes_.data());
      if (top + 2 > 64) throw DomainError("bvh traversal stack overflow");
      stack[top++] = node.first;
      stack[top++] = self + 1;
    }
  }
  return found;
}

bool Bvh::intersect(const Ray& ray, Hit& hit) const {
  hit = Hit{};
  return traverse<false>(ray, &hit);
}

bool Bvh::occluded(const Ray& ray) const { return traverse<true>(ray, nullptr); }

SurfacePoint surface_point(const Geometry& g, const Ray& ray, const Hit& hit) {
  const auto& tri = g.triangles[hit.triangle];
  const double b0 = 1.0 - hit.b1 - hit.b2;
  SurfacePoint sp;
  const Vec3 &p0 = g.positions[tri[0]], &p1 = g.positions[tri[1]], &p2 = g.positions[tri[2]];
  sp.position = ray.at(hit.t);
  sp.geometric_normal = normalize(cross(p1 - p0, p2 - p0));
  Vec3 n = g.normals[tri[0]] * b0 + g.normals[tri[1]] * hit.b1 + g.normals[tri[2]] * hit.b2;
  sp.shading_normal = length_squared(n) > 1e-20 ? normalize(n) : sp.geometric_normal;
  const Vec2 &t0 = g.uvs[tri[0]], &t1 = g.uvs[tri[1]], &t2 = g.uvs[tri[2]];
  sp.uv = {t0.x * b0 + t1.x * hit.b1 + t2.x * hit.b2, t0.y * b0 + t1.y * hit.b1 + t2.y * hit.b2};
  if (!g.vertex_materials.empty()) {
    const MaterialSample &m0 = g.vertex_materials[tri[0]], &m1 = g.vertex_materials[tri[1]],
                         &m2 = g.vertex_materials[tri[2]];
    sp.material.base_color = m0.base_color * b0 + m1.base_color * hit.b1 + m2.base_color * hit.b2;
    sp.material.roughness = m0.roughness * b0 + m1.roughness * hit.b1 + m2.roughness * hit.b2;
    sp.material.metallic = m0.metallic * b0 + m1.metallic * hit.b1 + m2.metallic * hit.b2;
  } else {
    sp.material = g.materials[g.material_ids[hit.triangle]].evaluate(sp.uv);
  }
  return sp;
}

}  // namespace drforge
