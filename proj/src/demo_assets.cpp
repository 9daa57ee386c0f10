// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/demo_assets.hpp"

#include <cmath>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/rng.hpp"

namespace drforge {

namespace fs = std::filesystem;

void append_mesh(Mesh& mesh, const Mesh& part, const Vec3& offset) {
  const int base = static_cast<int>(mesh.positions.size());
  for (const Vec3& p : part.positions) mesh.positions.push_back(p + offset);
  mesh.normals.insert(mesh.normals.end(), part.normals.begin(), part.normals.end());
  mesh.uvs.insert(mesh.uvs.end(), part.uvs.begin(), part.uvs.end());
  for (const auto& t : part.triangles) mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

void recompute_normals(Mesh& mesh) {
  std::vector<Vec3> acc(mesh.positions.size(), Vec3{0, 0, 0});
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.positions[t[0]];
    Vec3 n = cross(mesh.positions[t[1]] - a, mesh.positions[t[2]] - a);  // length = 2 * area
    for (int i : t) acc[i] = acc[i] + n;
  }
  mesh.normals.resize(mesh.positions.size());
  for (std::size_t i = 0; i < acc.size(); ++i)
    mesh.normals[i] = length(acc[i]) > 1e-12 ? normalize(acc[i]) : Vec3{0, 1, 0};
}

namespace {

// Grid of (segments + 1) x (rings + 1) vertices triangulated as quads.
void grid_triangles(Mesh& m, int segments, int rings) {
  const int stride = segments + 1;
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      int a = r * stride + s, b = a + stride, c = b + 1, d = a + 1;
      m.triangles.push_back({a, b, d});
      m.triangles.push_back({d, b, c});
    }
}

}  // namespace

Mesh make_torus(double major_radius, double minor_radius, int segments, int rings) {
  if (!(major_radius > minor_radius && minor_radius > 0)) throw DomainError("make_torus: need R > r > 0");
  Mesh m;
  for (int r = 0; r <= rings; ++r) {
    double v = kTwoPi * r / rings;
    for (int s = 0; s <= segments; ++s) {
      double u = kTwoPi * s / segments;
      Vec3 radial{std::cos(u), 0, -std::sin(u)};
      Vec3 n = radial * std::cos(v) + Vec3{0, std::sin(v), 0};
      m.positions.push_back(radial * major_radius + n * minor_radius);
      m.normals.push_back(n);
      m.uvs.push_back({static_cast<double>(s) / segments, static_cast<double>(r) / rings});
    }
  }
  grid_triangles(m, segments, rings);
  return m;
}

Mesh make_lathe(const std::vector<Vec2>& profile, int segments) {
  if (profile.size() < 2) throw DomainError("make_lathe: profile needs at least two points");
  Mesh m;
  const int rows = static_cast<int>(profile.size());
  double total = 0;
  std::vector<double> arc(rows, 0.0);
  for (int i = 1; i < rows; ++i) {
    total += std::hypot(profile[i].x - profile[i - 1].x, profile[i].y - profile[i - 1].y);
    arc[i] = total;
  }
  for (int i = 0; i < rows; ++i) {
    // Profile tangent by central differences; the normal is its outward perpendicular.
    const Vec2& prev = profile[std::max(i - 1, 0)];
    const Vec2& next = profile[std::min(i + 1, rows - 1)];
    Vec2 tangent{next.x - prev.x, next.y - prev.y};
    for (int s = 0; s <= segments; ++s) {
      double u = kTwoPi * s / segments;
      Vec3 radial{std::cos(u), 0, -std::sin(u)};
      m.positions.push_back(radial * profile[i].x + Vec3{0, profile[i].y, 0});
      Vec3 n = radial * tangent.y + Vec3{0, -tangent.x, 0};
      m.normals.push_back(length(n) > 1e-12 ? normalize(n) : Vec3{0, tangent.x > 0 ? -1.0 : 1.0, 0});
      m.uvs.push_back({static_cast<double>(s) / segments, arc[i] / total});
    }
  }
  grid_triangles(m, segments, rows - 1);
  return m;
}

Mesh make_blob(std::uint64_t seed, double radius, int segments, int rings) {
  Pcg32 rng = Pcg32::keyed({seed, 0xb10b});
  struct Lobe {
    Vec3 dir;
    double amplitude, sharpness;
  };
  std::vector<Lobe> lobes;
  for (int i = 0; i < 5; ++i) {
    double z = rng.uniform(-1.0, 1.0), phi = rng.uniform(0.0, kTwoPi), s = safe_sqrt(1 - z * z);
    lobes.push_back({{s * std::cos(phi), z, s * std::sin(phi)}, rng.uniform(-0.15, 0.25), rng.uniform(2.0, 6.0)});
  }
  Mesh m = make_sphere(1.0, segments, rings);
  for (Vec3& p : m.positions) {
    Vec3 d = normalize(p);
    double scale = 1.0;
    for (const Lobe& l : lobes) scale += l.amplitude * std::exp(l.sharpness * (dot(d, l.dir) - 1.0));
    p = d * (radius * scale);
  }
  recompute_normals(m);
  return m;
}

Mesh make_stool() {
  Mesh m;
  append_mesh(m, make_cylinder(0.45, 0.08, 48), {0, 0.76, 0});
  for (int i = 0; i < 4; ++i) {
    double a = kPi * (0.25 + 0.5 * i);
    append_mesh(m, make_cylinder(0.05, 0.72, 16), {0.3 * std::cos(a), 0.36, 0.3 * std::sin(a)});
  }
  return m;
}

std::vector<std::string> demo_environment_names() { return {"studio", "sunny_sky", "sunset"}; }

EnvironmentMap demo_environment(const std::string& name, int width) {
  if (width < 4 || width % 2 != 0) throw DomainError("demo_environment: width must be even and >= 4");
  const int height = width / 2;
  Image img(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Vec3 d = texel_direction(x, y, width, height);
      Rgb c;
      if (name == "studio") {
        c = d.y > 0 ? Rgb(0.35, 0.35, 0.38) : Rgb(0.12, 0.11, 0.1);
        // Two soft boxes and a dim rim light.
        const Vec3 boxes[3] = {normalize(Vec3{0.7, 0.6, 0.4}), normalize(Vec3{-0.8, 0.4, 0.3}),
                               normalize(Vec3{0.0, 0.3, -1.0})};
        const Rgb power[3] = {Rgb(14, 13.5, 13), Rgb(5, 5.5, 6), Rgb(2.5, 2.5, 2.5)};
        for (int i = 0; i < 3; ++i)
          if (dot(d, boxes[i]) > 0.96) c = power[i];
      } else if (name == "sunny_sky") {
        double t = std::max(d.y, 0.0);
        c = d.y >= 0 ? lerp(Rgb(0.75, 0.85, 1.0), Rgb(0.2, 0.4, 0.9), std::pow(t, 0.5)) : Rgb(0.25, 0.2, 0.15);
        const Vec3 sun = normalize(Vec3{0.4, 0.65, -0.5});
        if (dot(d, sun) > 0.9985) c = Rgb(180, 170, 150);
        else if (dot(d, sun) > 0.99) c += Rgb(3, 2.8, 2.4);
      } else if (name == "sunset") {
        double t = std::clamp(d.y, 0.0, 1.0);
        c = d.y >= 0 ? lerp(Rgb(1.6, 0.7, 0.3), Rgb(0.15, 0.2, 0.45), std::pow(t, 0.4)) : Rgb(0.08, 0.06, 0.05);
        const Vec3 sun = normalize(Vec3{-0.9, 0.08, 0.4});
        if (dot(d, sun) > 0.998) c = Rgb(60, 35, 15);
      } else {
        throw DomainError("unknown demo environment '" + name + "'");
      }
      img.set_rgb(x, y, c);
    }
  return EnvironmentMap(std::move(img));
}

namespace {

struct TextureSpec {
  const char* name;
  Rgb a, b;
  double rough_a, rough_b;
  double metal_a, metal_b;
  int pattern;  // 0 checker, 1 stripes, 2 noise, 3 bricks
};

// Pattern value in [0,1] at texel (x, y) of a size x size map.
double pattern_value(int pattern, int x, int y, int size, Pcg32& rng) {
  switch (pattern) {
    case 0: return ((x * 8 / size) + (y * 8 / size)) % 2;
    case 1: return (x * 6 / size) % 2;
    case 2: return rng.uniform();
    default: {
      int row = y * 8 / size;
      int shift = (row % 2) * size / 8;
      bool mortar = (y % (size / 8)) < 1 || ((x + shift) % (size / 4)) < 1;
      return mortar ? 0.0 : 1.0;
    }
  }
}

}  // namespace

DemoPools write_demo_assets(const fs::path& root, int env_width) {
  DemoPools pools{root / "assets", root / "textures", root / "envs"};
  for (const auto& dir : {pools.assets, pools.textures, pools.envs}) fs::create_directories(dir);

  save_obj(pools.assets / "torus.obj", make_torus(0.5, 0.18));
  save_obj(pools.assets / "vase.obj", make_lathe({{0.0, 0.0}, {0.25, 0.0}, {0.35, 0.2}, {0.3, 0.55}, {0.15, 0.8},
                                                  {0.18, 1.0}, {0.16, 1.0}, {0.12, 0.8}}));
  save_obj(pools.assets / "blob.obj", make_blob(7));
  save_obj(pools.assets / "stool.obj", make_stool());

  const TextureSpec textures[] = {
      {"checker", {0.8, 0.8, 0.78}, {0.1, 0.1, 0.12}, 0.3, 0.7, 0.0, 0.0, 0},
      {"stripes", {0.7, 0.2, 0.15}, {0.9, 0.8, 0.5}, 0.5, 0.2, 0.0, 0.0, 1},
      {"brushed", {0.9, 0.75, 0.5}, {0.7, 0.6, 0.45}, 0.25, 0.4, 1.0, 1.0, 2},
      {"bricks", {0.6, 0.3, 0.2}, {0.75, 0.72, 0.68}, 0.8, 0.95, 0.0, 0.0, 3},
  };
  constexpr int size = 64;
  for (const auto& t : textures) {
    Image base(size, size, 3), rough(size, size, 3), metal(size, size, 3);
    Pcg32 rng = Pcg32::keyed({0x7e47u, static_cast<std::uint64_t>(t.pattern)});
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double v = pattern_value(t.pattern, x, y, size, rng);
        Rgb c = srgb_encode(lerp(t.b, t.a, v));
        base.set_rgb(x, y, c);
        rough.set_rgb(x, y, Rgb(t.rough_b + (t.rough_a - t.rough_b) * v));
        metal.set_rgb(x, y, Rgb(t.metal_b + (t.metal_a - t.metal_b) * v));
      }
    fs::path dir = pools.textures / t.name;
    fs::create_directories(dir);
    write_png(dir / "basecolor.png", base);
    write_png(dir / "roughness.png", rough);
    write_png(dir / "metallic.png", metal);
  }

  for (const auto& name : demo_environment_names())
    save_environment(pools.envs / (name + ".exr"), demo_environment(name, env_width));
  return pools;
}

}  // namespace drforge
