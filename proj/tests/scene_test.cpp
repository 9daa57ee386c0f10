// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/scene.hpp"

#include <gtest/gtest.h>

#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/rng.hpp"
#include "support.hpp"

namespace drforge {
namespace {

using testing::temp_dir;

void expect_box(const Aabb& box, const Vec3& lo, const Vec3& hi, double tol = 1e-12) {
  EXPECT_NEAR(box.min.x, lo.x, tol);
  EXPECT_NEAR(box.min.y, lo.y, tol);
  EXPECT_NEAR(box.min.z, lo.z, tol);
  EXPECT_NEAR(box.max.x, hi.x, tol);
  EXPECT_NEAR(box.max.y, hi.y, tol);
  EXPECT_NEAR(box.max.z, hi.z, tol);
}

TEST(Aabb, UnitCubeAtOrigin) {
  expect_box(aabb(make_box({1, 1, 1}), Transform{}), {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
}

TEST(Aabb, UnitCubeScaledTwice) {
  Transform t;
  t.scale = 2.0;
  expect_box(aabb(make_box({1, 1, 1}), t), {-1, -1, -1}, {1, 1, 1});
}

TEST(Aabb, TranslatedSphere) {
  Transform t;
  t.translation = {3, 0, 0};
  expect_box(aabb(make_sphere(1.0), t), {2, -1, -1}, {4, 1, 1}, 1e-9);
}

TEST(Aabb, EmptyMeshIsDomainError) { EXPECT_THROW(aabb(Mesh{}, Transform{}), DomainError); }

TEST(Aabb, RotatedBoxGrows) {
  Transform t;
  t.rotation = rotation_y(kPi / 4);
  Aabb box = aabb(make_box({1, 1, 1}), t);
  EXPECT_NEAR(box.max.x, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(box.max.y, 0.5, 1e-12);
}

TEST(Aabb, OverlapWithMargin) {
  Aabb a{{0, 0, 0}, {1, 1, 1}}, b{{1.01, 0, 0}, {2, 1, 1}};
  EXPECT_FALSE(overlaps(a, b));
  EXPECT_TRUE(overlaps(a, b, 0.02));
  EXPECT_TRUE(overlaps(a, Aabb{{0.5, 0.5, 0.5}, {3, 3, 3}}));
}

TEST(PoseAt, StaticTrackReturnsStoredPose) {
  CameraTrack track;
  Pose p{{1, 2, 3}, rotation_y(0.3)};
  track.poses.assign(4, p);
  EXPECT_EQ(pose_at(track, 0), p);
  EXPECT_EQ(pose_at(track, 3), p);
}

TEST(PoseAt, OutOfRangeFrameIsIndexError) {
  CameraTrack track;
  track.poses.resize(24);
  EXPECT_THROW(pose_at(track, 24), IndexError);
  EXPECT_THROW(pose_at(track, -1), IndexError);
}

TEST(Mesh, PrimitivesHaveConsistentAttributes) {
  for (const Mesh& m : {make_box({1, 2, 3}), make_sphere(0.5), make_cylinder(0.5, 1.0), make_ground_quad(4, 2)}) {
    ASSERT_FALSE(m.empty());
    EXPECT_EQ(m.normals.size(), m.positions.size());
    EXPECT_EQ(m.uvs.size(), m.positions.size());
    for (const Vec3& n : m.normals) EXPECT_NEAR(length(n), 1.0, 1e-9);
    for (const auto& tri : m.triangles)
      for (int i : tri) {
        EXPECT_GE(i, 0);
        EXPECT_LT(i, static_cast<int>(m.positions.size()));
      }
  }
}

TEST(Obj, SaveLoadRoundTrip) {
  auto dir = temp_dir("obj");
  Mesh m = make_cylinder(0.4, 1.3, 12);
  save_obj(dir / "c.obj", m);
  Mesh back = load_obj(dir / "c.obj");
  ASSERT_EQ(back.triangles.size(), m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = back.positions[back.triangles[t][k]], b = m.positions[m.triangles[t][k]];
      EXPECT_NEAR(a.x, b.x, 1e-12);
      EXPECT_NEAR(a.y, b.y, 1e-12);
      EXPECT_NEAR(a.z, b.z, 1e-12);
      const Vec2 ua = back.uvs[back.triangles[t][k]], ub = m.uvs[m.triangles[t][k]];
      EXPECT_NEAR(ua.x, ub.x, 1e-12);
      EXPECT_NEAR(ua.y, ub.y, 1e-12);
    }
}

TEST(Obj, ParsesQuadsAndMissingNormals) {
  auto dir = temp_dir("obj_quad");
  write_text_atomically(dir / "q.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  Mesh m = load_obj(dir / "q.obj");
  EXPECT_EQ(m.triangles.size(), 2u);
  ASSERT_EQ(m.normals.size(), 4u);
  EXPECT_NEAR(m.normals[0].z, 1.0, 1e-9);
}

TEST(Obj, MalformedFileIsFormatError) {
  auto dir = temp_dir("obj_bad");
  write_text_atomically(dir / "b.obj", "v 0 0 0\nf 1 2 9\n");
  EXPECT_THROW(load_obj(dir / "b.obj"), FormatError);
}

SceneDescription sample_description() {
  SceneDescription s;
  s.seed = 42;
  GroundPlane g;
  g.material.base_color_map = "/tex/checker/basecolor.png";
  g.material.uv_repeat = 3;
  s.ground = g;
  SceneObject obj;
  obj.name = "object_0";
  obj.mesh_path = "/assets/torus.obj";
  obj.transform.translation = {0.5, 0.25, -0.125};
  obj.transform.rotation = rotation_y(1.1);
  obj.transform.scale = 0.7;
  obj.material.roughness = 0.3;
  obj.track = {obj.transform, obj.transform};
  s.objects.push_back(obj);
  SceneObject cube;
  cube.name = "cube_0";
  cube.kind = BodyKind::cube;
  cube.shape = {0.3, 0.4, 0.5};
  cube.material.base_color = {0.1, 0.2, 0.3};
  cube.material.metallic = 1.0;
  s.primitives.push_back(cube);
  s.env = {"/envs/studio.exr", 0.4, true, 1.5, {0.0, 0.1}};
  s.camera.poses = {{{0, 1, 4}, look_at_rotation({0, 1, 4}, {0, 0, 0})},
                    {{0.1, 1, 4}, look_at_rotation({0.1, 1, 4}, {0, 0, 0})}};
  s.motion = MotionKind::object_rotation;
  return s;
}

TEST(SceneJson, RoundTripIsIdentical) {
  SceneDescription s = sample_description();
  EXPECT_EQ(scene_from_json(scene_to_json(s)), s);
  EXPECT_EQ(scene_to_json(scene_from_json(scene_to_json(s))), scene_to_json(s));
}

TEST(SceneJson, FileRoundTrip) {
  auto dir = temp_dir("scene_json");
  SceneDescription s = sample_description();
  save_scene(dir / "scene.json", s);
  EXPECT_EQ(load_scene_description(dir / "scene.json"), s);
}

TEST(SceneJson, RejectsMalformedInput) {
  EXPECT_THROW(scene_from_json("{not json"), FormatError);
  EXPECT_THROW(scene_from_json(R"({"version": 99})"), FormatError);
}

TEST(SceneDescription, BodiesListsObjectsThenPrimitives) {
  SceneDescription s = sample_description();
  auto all = bodies(s);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0]->name, "object_0");
  EXPECT_EQ(all[1]->name, "cube_0");
}

TEST(SceneDescription, BodyTransformFollowsTrack) {
  SceneObject obj;
  obj.transform.translation = {1, 0, 0};
  Transform moved;
  moved.translation = {2, 0, 0};
  obj.track = {obj.transform, moved};
  EXPECT_EQ(body_transform(obj, 1).translation.x, 2.0);
  obj.track.clear();
  EXPECT_EQ(body_transform(obj, 5).translation.x, 1.0);
}

TEST(MotionKind, StringRoundTrip) {
  for (MotionKind k : {MotionKind::none, MotionKind::orbit, MotionKind::oscillation, MotionKind::light_rotation,
                       MotionKind::object_rotation, MotionKind::object_translation})
    EXPECT_EQ(motion_kind_from_string(to_string(k)), k);
  EXPECT_THROW(motion_kind_from_string("spin"), FormatError);
}

Image random_texture(int w, int h, std::uint64_t seed) {
  Image img(w, h, 3);
  Pcg32 rng = Pcg32::keyed({seed});
  for (float& v : img.data) v = static_cast<float>(rng.uniform());
  return img;
}

// Bilinear lookup written out directly: uv (0,0) is the bottom-left corner,
// texel centers sit at half-integer positions and addressing repeats.
double texture_oracle(const Image& img, double u, double v, int c) {
  double x = u * img.width - 0.5, y = (1 - v) * img.height - 0.5;
  double x0 = std::floor(x), y0 = std::floor(y);
  double fx = x - x0, fy = y - y0;
  auto at = [&](double xi, double yi) {
    int xx = static_cast<int>(xi) % img.width, yy = static_cast<int>(yi) % img.height;
    if (xx < 0) xx += img.width;
    if (yy < 0) yy += img.height;
    return static_cast<double>(img.at(xx, yy, c));
  };
  return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) + fy * ((1 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1));
}

TEST(Texture, BilinearMatchesOracle) {
  Image img = random_texture(7, 5, 3);
  Pcg32 rng = Pcg32::keyed({4});
  for (int i = 0; i < 200; ++i) {
    double u = rng.uniform(-2, 3), v = rng.uniform(-2, 3);
    Rgb s = sample_texture_rgb(img, {u, v});
    EXPECT_NEAR(s.r, texture_oracle(img, u, v, 0), 1e-6);
    EXPECT_NEAR(s.g, texture_oracle(img, u, v, 1), 1e-6);
    EXPECT_NEAR(s.b, texture_oracle(img, u, v, 2), 1e-6);
  }
}

TEST(Texture, TexelCenterReturnsTexel) {
  Image img = random_texture(8, 4, 5);
  Rgb s = sample_texture_rgb(img, {(2 + 0.5) / 8, 1 - (1 + 0.5) / 4});
  EXPECT_NEAR(s.g, img.at(2, 1, 1), 1e-6);
}

TEST(Material, ConstantMaterialEvaluatesToDescription) {
  MaterialDesc d;
  d.base_color = {0.2, 0.4, 0.6};
  d.roughness = 0.35;
  d.metallic = 0.5;
  TextureCache cache;
  MaterialSample s = resolve_material(d, cache).evaluate({0.3, 0.7});
  EXPECT_EQ(s.base_color, d.base_color);
  EXPECT_EQ(s.roughness, 0.35);
  EXPECT_EQ(s.metallic, 0.5);
}

TEST(Material, MissingTextureIsIoError) {
  MaterialDesc d;
  d.base_color_map = "/nonexistent/basecolor.png";
  TextureCache cache;
  EXPECT_THROW(resolve_material(d, cache), IoError);
}

}  // namespace
}  // namespace drforge
