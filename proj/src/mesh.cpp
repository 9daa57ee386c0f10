// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/scene.hpp"

namespace drforge {

bool overlaps(const Aabb& a, const Aabb& b, double margin) {
  for (int i = 0; i < 3; ++i) {
    if (a.max[i] + margin <= b.min[i] - margin) return false;
    if (b.max[i] + margin <= a.min[i] - margin) return false;
  }
  return true;
}

Aabb aabb(const Mesh& mesh, const Transform& transform) {
  if (mesh.positions.empty()) throw DomainError("aabb: mesh has no vertices");
  Aabb box;
  for (const Vec3& p : mesh.positions) box.expand(transform.apply_point(p));
  return box;
}

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

namespace {

// Resolves a 1-based (or negative, relative) OBJ index.
int obj_index(int raw, std::size_t count, const fs::path& path, int line) {
  int idx = raw > 0 ? raw - 1 : static_cast<int>(count) + raw;
  if (raw == 0 || idx < 0 || idx >= static_cast<int>(count))
    throw FormatError(path.string() + ":" + std::to_string(line) + ": index out of range");
  return idx;
}

}  // namespace

Mesh load_obj(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh " + path.string());

  std::vector<Vec3> pos, nrm;
  std::vector<Vec2> tex;
  // Unique (position, texcoord, normal) corners.
  std::map<std::tuple<int, int, int>, int> corner_ids;
  std::vector<std::tuple<int, int, int>> corners;
  std::vector<std::array<int, 3>> tris;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x >> p.y >> p.z)) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad vertex");
      pos.push_back(p);
    } else if (tag == "vn") {
      Vec3 n;
      if (!(ss >> n.x >> n.y >> n.z)) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad normal");
      nrm.push_back(n);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ss >> t.x >> t.y)) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad texcoord");
      tex.push_back(t);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string token;
      while (ss >> token) {
        int vi = 0, ti = 0, ni = 0;
        int* fields[3] = {&vi, &ti, &ni};
        std::size_t start = 0;
        for (int k = 0; k < 3 && start <= token.size(); ++k) {
          std::size_t end = token.find('/', start);
          if (end == std::string::npos) end = token.size();
          if (end > start) {
            auto [ptr, ec] = std::from_chars(token.data() + start, token.data() + end, *fields[k]);
            if (ec != std::errc()) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad face");
          }
          start = end + 1;
        }
        int p = obj_index(vi, pos.size(), path, line_no);
        int t = ti ? obj_index(ti, tex.size(), path, line_no) : -1;
        int n = ni ? obj_index(ni, nrm.size(), path, line_no) : -1;
        auto key = std::make_tuple(p, t, n);
        auto [it, inserted] = corner_ids.try_emplace(key, static_cast<int>(corners.size()));
        if (inserted) corners.push_back(key);
        face.push_back(it->second);
      }
      if (face.size() < 3) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": face with < 3 vertices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) tris.push_back({face[0], face[k], face[k + 1]});
    }
  }
  if (tris.empty()) throw FormatError(path.string() + ": mesh has no faces");

  Mesh mesh;
  mesh.triangles = std::move(tris);
  mesh.positions.resize(corners.size());
  mesh.normals.resize(corners.size());
  mesh.uvs.resize(corners.size());
  // Area-weighted normals per position for corners that lack one.
  std::vector<Vec3> smooth(pos.size());
  for (const auto& t : mesh.triangles) {
    const Vec3& a = pos[std::get<0>(corners[t[0]])];
    const Vec3& b = pos[std::get<0>(corners[t[1]])];
    const Vec3& c = pos[std::get<0>(corners[t[2]])];
    Vec3 fn = cross(b - a, c - a);
    for (int k = 0; k < 3; ++k) smooth[std::get<0>(corners[t[k]])] += fn;
  }
  for (std::size_t i = 0; i < corners.size(); ++i) {
    auto [p, t, n] = corners[i];
    mesh.positions[i] = pos[p];
    Vec3 normal = n >= 0 ? nrm[n] : smooth[p];
    mesh.normals[i] = length(normal) > 0 ? normalize(normal) : Vec3{0, 1, 0};
    mesh.uvs[i] = t >= 0 ? tex[t] : Vec2{pos[p].x + pos[p].z, pos[p].y};
  }
  return mesh;
}

void save_obj(const fs::path& path, const Mesh& mesh) {
  std::string out;
  char buf[160];
  for (const auto& p : mesh.positions) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out += buf;
  }
  for (const auto& t : mesh.uvs) {
    std::snprintf(buf, sizeof(buf), "vt %.17g %.17g\n", t.x, t.y);
    out += buf;
  }
  for (const auto& n : mesh.normals) {
    std::snprintf(buf, sizeof(buf), "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof(buf), "f %d/%d/%d %d/%d/%d %d/%d/%d\n", t[0] + 1, t[0] + 1, t[0] + 1,
                  t[1] + 1, t[1] + 1, t[1] + 1, t[2] + 1, t[2] + 1, t[2] + 1);
    out += buf;
  }
  write_text_atomically(path, out);
}

// ---------------------------------------------------------------------------
// Tessellation
// ---------------------------------------------------------------------------

Mesh make_box(const Vec3& size) {
  const Vec3 h = size * 0.5;
  Mesh m;
  // normal, tangent u, tangent v for each face; corners = n*h +- u*h +- v*h
  const Vec3 axes[6][3] = {{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}, {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
                           {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}}, {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
                           {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}}};
  auto scale = [&](const Vec3& v) { return Vec3{v.x * h.x, v.y * h.y, v.z * h.z}; };
  for (const auto& f : axes) {
    int base = static_cast<int>(m.positions.size());
    const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (const auto& c : corners) {
      m.positions.push_back(scale(f[0] + f[1] * c[0] + f[2] * c[1]));
      m.normals.push_back(f[0]);
      m.uvs.push_back({(c[0] + 1) * 0.5, (c[1] + 1) * 0.5});
    }
    m.triangles.push_back({base, base + 1, base + 2});
    m.triangles.push_back({base, base + 2, base + 3});
  }
  return m;
}

Mesh make_sphere(double radius, int segments, int rings) {
  Mesh m;
  for (int r = 0; r <= rings; ++r) {
    double theta = kPi * r / rings;
    for (int s = 0; s <= segments; ++s) {
      double phi = kTwoPi * s / segments;
      Vec3 n{std::sin(theta) * std::cos(phi), std::cos(theta), -std::sin(theta) * std::sin(phi)};
      m.positions.push_back(n * radius);
      m.normals.push_back(n);
      m.uvs.push_back({static_cast<double>(s) / segments, 1.0 - static_cast<double>(r) / rings});
    }
  }
  const int stride = segments + 1;
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      int a = r * stride + s, b = a + stride, c = b + 1, d = a + 1;
      if (r != 0) m.triangles.push_back({a, b, d});
      if (r != rings - 1) m.triangles.push_back({d, b, c});
    }
  return m;
}

Mesh make_cylinder(double radius, double height, int segments) {
  Mesh m;
  const double hh = height * 0.5;
  for (int s = 0; s <= segments; ++s) {
    double phi = kTwoPi * s / segments;
    Vec3 n{std::cos(phi), 0, -std::sin(phi)};
    for (double y : {-hh, hh}) {
      m.positions.push_back({n.x * radius, y, n.z * radius});
      m.normals.push_back(n);
      m.uvs.push_back({static_cast<double>(s) / segments, y > 0 ? 1.0 : 0.0});
    }
  }
  for (int s = 0; s < segments; ++s) {
    int a = 2 * s, b = a + 1, c = a + 2, d = a + 3;
    m.triangles.push_back({a, c, b});
    m.triangles.push_back({b, c, d});
  }
  for (double sign : {-1.0, 1.0}) {
    int center = static_cast<int>(m.positions.size());
    Vec3 n{0, sign, 0};
    m.positions.push_back({0, sign * hh, 0});
    m.normals.push_back(n);
    m.uvs.push_back({0.5, 0.5});
    for (int s = 0; s <= segments; ++s) {
      double phi = kTwoPi * s / segments;
      double cx = std::cos(phi), cz = -std::sin(phi);
      m.positions.push_back({cx * radius, sign * hh, cz * radius});
      m.normals.push_back(n);
      m.uvs.push_back({0.5 + 0.5 * cx, 0.5 + 0.5 * cz});
    }
    for (int s = 0; s < segments; ++s) {
      int a = center + 1 + s, b = a + 1;
      if (sign > 0)
        m.triangles.push_back({center, a, b});
      else
        m.triangles.push_back({center, b, a});
    }
  }
  return m;
}

Mesh make_ground_quad(double half_extent, double uv_repeat) {
  Mesh m;
  const double e = half_extent;
  m.positions = {{-e, 0, -e}, {-e, 0, e}, {e, 0, e}, {e, 0, -e}};
  m.normals.assign(4, Vec3{0, 1, 0});
  for (const auto& p : m.positions)
    m.uvs.push_back({(p.x + e) / (2 * e) * uv_repeat, (e - p.z) / (2 * e) * uv_repeat});
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

// ---------------------------------------------------------------------------
// Textures
// ---------------------------------------------------------------------------

namespace {

struct Bilinear {
  int x0, x1, y0, y1;
  double fx, fy;
};

Bilinear bilinear_repeat(const Image& image, const Vec2& uv) {
  double x = uv.x * image.width - 0.5;
  double y = (1.0 - uv.y) * image.height - 0.5;
  double fl_x = std::floor(x), fl_y = std::floor(y);
  auto wrap = [](long long i, int n) { return static_cast<int>(((i % n) + n) % n); };
  Bilinear b;
  b.fx = x - fl_x;
  b.fy = y - fl_y;
  b.x0 = wrap(static_cast<long long>(fl_x), image.width);
  b.x1 = wrap(static_cast<long long>(fl_x) + 1, image.width);
  b.y0 = wrap(static_cast<long long>(fl_y), image.height);
  b.y1 = wrap(static_cast<long long>(fl_y) + 1, image.height);
  return b;
}

double bilerp(const Image& image, const Bilinear& b, int c) {
  double top = image.at(b.x0, b.y0, c) * (1 - b.fx) + image.at(b.x1, b.y0, c) * b.fx;
  double bottom = image.at(b.x0, b.y1, c) * (1 - b.fx) + image.at(b.x1, b.y1, c) * b.fx;
  return top * (1 - b.fy) + bottom * b.fy;
}

}  // namespace

Rgb sample_texture_rgb(const Image& image, const Vec2& uv) {
  Bilinear b = bilinear_repeat(image, uv);
  if (image.channels < 3) {
    double v = bilerp(image, b, 0);
    return Rgb(v);
  }
  return {bilerp(image, b, 0), bilerp(image, b, 1), bilerp(image, b, 2)};
}

double sample_texture_scalar(const Image& image, const Vec2& uv) {
  return bilerp(image, bilinear_repeat(image, uv), 0);
}

}  // namespace drforge
