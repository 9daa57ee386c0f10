// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/scenegen.hpp"

#include <gtest/gtest.h>

#include <set>

#include "drforge/demo_assets.hpp"
#include "drforge/error.hpp"
#include "support.hpp"

namespace drforge {
namespace {

class ScenegenTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(testing::temp_dir("scenegen"));
    DemoPools pools = write_demo_assets(*root_, 64);
    pools_ = new AssetPools(scan_pools(pools.assets, pools.textures, pools.envs));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
    delete pools_;
  }

  GenConfig config() const {
    GenConfig c;
    c.pools = *pools_;
    return c;
  }

  MeshCache meshes_;
  static fs::path* root_;
  static AssetPools* pools_;
};

fs::path* ScenegenTest::root_ = nullptr;
AssetPools* ScenegenTest::pools_ = nullptr;

double azimuth(const Vec3& p, const Vec3& pivot) { return std::atan2(p.x - pivot.x, p.z - pivot.z); }

TEST_F(ScenegenTest, PoolsAreScanned) {
  EXPECT_EQ(pools_->meshes.size(), 4u);
  EXPECT_EQ(pools_->textures.size(), 4u);
  EXPECT_EQ(pools_->envs.size(), demo_environment_names().size());
}

TEST_F(ScenegenTest, SameSeedGivesIdenticalScene) {
  GenConfig c = config();
  MeshCache other;
  for (std::uint64_t seed : {0u, 7u, 123u}) {
    EXPECT_EQ(generate_scene(c, seed, meshes_), generate_scene(c, seed, other));
    EXPECT_EQ(generate_clip(c, seed, meshes_), generate_clip(c, seed, other));
  }
  EXPECT_NE(generate_scene(c, 1, meshes_), generate_scene(c, 2, meshes_));
}

TEST_F(ScenegenTest, PlacedBodiesAreDisjointAndResting) {
  GenConfig c = config();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SceneDescription s = generate_scene(c, seed, meshes_);
    EXPECT_GE(s.objects.size(), 1u);
    EXPECT_LE(s.objects.size(), 3u);
    EXPECT_LE(s.primitives.size(), 3u);
    auto all = bodies(s);
    std::vector<Aabb> boxes;
    for (const SceneObject* b : all) boxes.push_back(aabb(*meshes_.get(*b), b->transform));
    for (const Aabb& box : boxes) EXPECT_NEAR(box.min.y, s.ground->height, 1e-9);
    for (std::size_t i = 0; i < boxes.size(); ++i)
      for (std::size_t j = i + 1; j < boxes.size(); ++j) EXPECT_FALSE(overlaps(boxes[i], boxes[j])) << seed;
  }
}

TEST_F(ScenegenTest, MaxObjectsOneGivesOneObject) {
  GenConfig c = config();
  c.max_objects = 1;
  c.max_primitives = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneDescription s = generate_scene(c, seed, meshes_);
    EXPECT_EQ(s.objects.size(), 1u);
    EXPECT_TRUE(s.primitives.empty());
    EXPECT_TRUE(s.ground.has_value());
  }
}

TEST_F(ScenegenTest, PlacementFailureNamesSeed) {
  GenConfig c = config();
  c.max_objects = 3;
  c.object_size_min = c.object_size_max = 1.2;
  c.placement_half_extent = 0.01;
  c.retry_limit = 3;
  bool thrown = false;
  for (std::uint64_t seed = 0; seed < 20 && !thrown; ++seed) {
    try {
      generate_scene(c, seed, meshes_);
    } catch (const GenerationError& e) {
      thrown = true;
      EXPECT_NE(std::string(e.what()).find("seed " + std::to_string(seed)), std::string::npos);
    }
  }
  EXPECT_TRUE(thrown);
}

TEST_F(ScenegenTest, EmptyPoolsAreRejected) {
  GenConfig c = config();
  c.pools.meshes.clear();
  EXPECT_THROW(generate_scene(c, 0, meshes_), DomainError);
}

TEST_F(ScenegenTest, InvalidConfigIsRejected) {
  GenConfig c = config();
  c.retry_limit = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = config();
  c.frames = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = config();
  c.max_objects = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST_F(ScenegenTest, OrbitStepsFifteenDegrees) {
  GenConfig c = config();
  SceneDescription s = generate_scene(c, 11, meshes_);
  MotionTracks t = generate_motion(MotionKind::orbit, s, 24, 11, c, meshes_);
  ASSERT_EQ(t.camera.size(), 24u);
  // Frames f and f + 12 are antipodal on the orbit circle, so their midpoint
  // is the pivot.
  Vec3 pivot = (t.camera[0].position + t.camera[12].position) * 0.5;
  for (int f = 0; f + 1 < 24; ++f) {
    double d = azimuth(t.camera[f + 1].position, pivot) - azimuth(t.camera[f].position, pivot);
    d = std::remainder(d, kTwoPi);
    EXPECT_NEAR(std::abs(degrees(d)), 15.0, 1e-9);
    EXPECT_NEAR(t.camera[f].position.y, t.camera[0].position.y, 1e-12);
  }
}

TEST_F(ScenegenTest, OrbitHalfwayIsOppositeSide) {
  GenConfig c = config();
  SceneDescription s = generate_clip(c, 3, meshes_);
  MotionTracks t = generate_motion(MotionKind::orbit, s, 24, 3, c, meshes_);
  apply_motion(s, t);
  Vec3 pivot = (pose_at(s.camera, 0).position + pose_at(s.camera, 12).position) * 0.5;
  Vec3 a = pose_at(s.camera, 0).position - pivot, b = pose_at(s.camera, 12).position - pivot;
  EXPECT_NEAR(a.x, -b.x, 1e-9);
  EXPECT_NEAR(a.z, -b.z, 1e-9);
}

TEST_F(ScenegenTest, LightRotationKeepsCameraFixed) {
  GenConfig c = config();
  SceneDescription s = generate_scene(c, 5, meshes_);
  MotionTracks t = generate_motion(MotionKind::light_rotation, s, 24, 5, c, meshes_);
  for (const Pose& p : t.camera) EXPECT_EQ(p, t.camera[0]);
  ASSERT_EQ(t.env_yaw.size(), 24u);
  EXPECT_NEAR(t.env_yaw[1] - t.env_yaw[0], kTwoPi / 24, 1e-12);
  EXPECT_NEAR(t.env_yaw[23] - t.env_yaw[0], kTwoPi * 23 / 24, 1e-12);
}

TEST_F(ScenegenTest, ObjectMotionsStaySafe) {
  GenConfig c = config();
  for (MotionKind kind : {MotionKind::object_translation, MotionKind::object_rotation, MotionKind::oscillation}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SceneDescription s = generate_scene(c, seed, meshes_);
      apply_motion(s, generate_motion(kind, s, 24, seed, c, meshes_));
      EXPECT_TRUE(check_safety(s, meshes_).empty()) << to_string(kind) << " seed " << seed;
      EXPECT_EQ(s.frame_count(), 24);
    }
  }
}

TEST_F(ScenegenTest, OscillationStaysNearInitialPose) {
  GenConfig c = config();
  SceneDescription s = generate_scene(c, 9, meshes_);
  MotionTracks t = generate_motion(MotionKind::oscillation, s, 24, 9, c, meshes_);
  const Vec3 start = s.camera.poses[0].position;
  for (const Pose& p : t.camera) {
    EXPECT_LE(length(p.position - start), 0.5 * length(start));
    EXPECT_TRUE(is_orthonormal(p.rotation, 1e-6));
  }
}

TEST_F(ScenegenTest, ObjectTranslationWithoutObjectsIsDomainError) {
  GenConfig c = config();
  SceneDescription s = generate_scene(c, 1, meshes_);
  s.objects.clear();
  EXPECT_THROW(generate_motion(MotionKind::object_translation, s, 24, 1, c, meshes_), DomainError);
}

TEST_F(ScenegenTest, MovingKindsNeedTwoFrames) {
  GenConfig c = config();
  SceneDescription s = generate_scene(c, 1, meshes_);
  EXPECT_THROW(generate_motion(MotionKind::orbit, s, 1, 1, c, meshes_), DomainError);
}

TEST_F(ScenegenTest, SafetyCheckDetectsInjectedOverlap) {
  GenConfig c = config();
  SceneDescription s = generate_clip(c, 2, meshes_);
  ASSERT_TRUE(check_safety(s, meshes_).empty());
  s.objects[0].transform.translation.y -= 0.5;
  s.objects[0].track.clear();
  EXPECT_FALSE(check_safety(s, meshes_).empty());
}

TEST_F(ScenegenTest, CoverageOfMotionKindsAndPrimitiveMaterials) {
  GenConfig c = config();
  c.frames = 2;
  std::set<MotionKind> kinds;
  bool textured = false, monolithic = false;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    kinds.insert(sample_motion_kind(c, seed));
    SceneDescription s = generate_scene(c, seed, meshes_);
    for (const SceneObject& p : s.primitives) (p.material.base_color_map.empty() ? monolithic : textured) = true;
  }
  EXPECT_EQ(kinds.size(), static_cast<std::size_t>(kMotionKindCount));
  EXPECT_TRUE(textured);
  EXPECT_TRUE(monolithic);
}

TEST_F(ScenegenTest, MotionWeightsSelectKinds) {
  GenConfig c = config();
  c.motion_weights = {0, 0, 1, 0, 0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_EQ(sample_motion_kind(c, seed), MotionKind::light_rotation);
}

}  // namespace
}  // namespace drforge
