// -*-c++-*---------------------------------------------------------------------------------------
// Copyright 2026 The fidslam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fidslam/errors.hpp>
#include <fidslam/pipeline.hpp>
#include <fidslam/simulator.hpp>

#include "test_util.hpp"

using namespace fidslam;
using test::rotX;
using test::rotY;
using test::rotZ;

namespace
{
// one static camera looking along +z at tags on a static wall
SimSpec singleCameraSpec(const std::map<int, Pose> & tags, double noise = 0.0)
{
  SimSpec spec;
  spec.cornerNoise = noise;
  spec.seed = 3;
  spec.scene.bodies.push_back(Body{
    "lab", BodyKind::Static, PosePrior{Pose(), PoseNoise::isotropic(1e-4, 1e-4)}, false});
  spec.scene.bodies.push_back(Body{"rig", BodyKind::Dynamic, std::nullopt, false});
  spec.staticTruth["lab"] = Pose();
  CameraSpec cam;
  cam.name = "cam0";
  cam.rig = "rig";
  cam.intrinsics = test::testIntrinsics();
  cam.extrinsicPrior = PosePrior{Pose(), PoseNoise::isotropic(1e-3, 1e-3)};
  spec.scene.cameras.push_back(cam);
  spec.cameraTruth["cam0"] = Pose();
  for (const auto & [id, p] : tags) {
    spec.scene.tags[id] = TagSpec{id, 0.2, "lab", std::nullopt};
    spec.tagTruth[id] = p;
  }
  spec.trajectories["rig"] = {Pose()};
  spec.stamps = {0.0};
  return (spec);
}

const TagDetection * find(const DetectionFrame & f, int id)
{
  for (const auto & c : f.cameras) {
    for (const auto & d : c.tags) {
      if (d.id == id) {
        return (&d);
      }
    }
  }
  return (nullptr);
}
}  // namespace

TEST(Simulator, HeadOnTagIsSymmetricAboutPrincipalPoint)
{
  const auto frames = renderDetections(singleCameraSpec({{1, Pose(Rotation(), Vector3(0, 0, 2))}}));
  const TagDetection * d = find(frames[0], 1);
  ASSERT_NE(d, nullptr);
  const Vector2 c(320, 240);
  // opposite corners are point-symmetric, half-size 0.1 m at 2 m and fx 600 -> 30 px
  EXPECT_LT((d->corners[0] + d->corners[2] - 2 * c).norm(), 1e-9);
  EXPECT_LT((d->corners[1] + d->corners[3] - 2 * c).norm(), 1e-9);
  for (const auto & k : d->corners) {
    EXPECT_NEAR((k - c).cwiseAbs().maxCoeff(), 30.0, 1e-9);
  }
}

TEST(Simulator, TagBehindCameraOrOutsideImageIsNotDetected)
{
  const auto frames = renderDetections(singleCameraSpec({
    {1, Pose(Rotation(), Vector3(0, 0, -2))},
    {2, Pose(Rotation(), Vector3(5, 0, 1))},
    {3, Pose(Rotation(), Vector3(0, 0, 200))},  // too small
    {4, Pose(rotX(0.3), Vector3(0.2, 0, 1.5))},
  }));
  EXPECT_EQ(find(frames[0], 1), nullptr);
  EXPECT_EQ(find(frames[0], 2), nullptr);
  EXPECT_EQ(find(frames[0], 3), nullptr);
  EXPECT_NE(find(frames[0], 4), nullptr);
}

TEST(Simulator, DetectionsAreInvariantToWorldRigidMotion)
{
  const SimSpec spec = makeRigBlockScenario(15, 4, 0.7);
  SimSpec moved = spec;
  const Pose g(rotZ(0.7) * rotX(-0.3), Vector3(3, -2, 0.5));
  for (auto & [b, p] : moved.staticTruth) {
    p = g * p;
  }
  for (auto & [b, traj] : moved.trajectories) {
    for (auto & p : traj) {
      p = g * p;
    }
  }
  const auto a = renderDetections(spec);
  const auto b = renderDetections(moved);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); i++) {
    ASSERT_EQ(a[i].cameras[0].tags.size(), b[i].cameras[0].tags.size());
    for (size_t k = 0; k < a[i].cameras[0].tags.size(); k++) {
      for (int j = 0; j < 4; j++) {
        EXPECT_LT(
          (a[i].cameras[0].tags[k].corners[j] - b[i].cameras[0].tags[k].corners[j]).norm(), 1e-8);
      }
    }
  }
  const auto oa = renderOdometry(spec);
  const auto ob = renderOdometry(moved);
  for (size_t i = 0; i < oa.size(); i++) {
    EXPECT_LT(ominus(oa[i].delta, ob[i].delta).norm(), 1e-10);
  }
}

TEST(Simulator, NoiseFreeOdometryDeadReckonsExactly)
{
  LoopOptions o;
  o.yawBias = 0;
  o.odomRotationNoise = 0;
  o.odomTranslationNoise = 0;
  o.cornerNoise = 0;
  const SimSpec spec = makeLoopScenario(40.0, 12, 400, 1, o);
  const auto dr = deadReckon(spec, renderOdometry(spec), "rig");
  const auto gt = groundTruth(spec, "rig");
  ASSERT_EQ(dr.size(), gt.size());
  double worst = 0;
  for (size_t i = 0; i < gt.size(); i++) {
    EXPECT_EQ(dr[i].first, gt[i].first);
    worst = std::max(worst, test::translationError(dr[i].second, gt[i].second));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Simulator, BiasedOdometryDrifts)
{
  const SimSpec spec = makeLoopScenario(40.0, 12, 400, 1);
  const auto dr = deadReckon(spec, renderOdometry(spec), "rig");
  EXPECT_GT(test::translationError(dr.back().second, spec.bodyPose("rig", 399)), 0.5);
}

TEST(Simulator, SeedDeterminesNoise)
{
  const auto a = renderDetections(makeRigBlockScenario(10, 11, 1.0));
  const auto b = renderDetections(makeRigBlockScenario(10, 11, 1.0));
  const auto c = renderDetections(makeRigBlockScenario(10, 12, 1.0));
  bool differs = false;
  for (size_t i = 0; i < a.size(); i++) {
    for (size_t k = 0; k < a[i].cameras[0].tags.size(); k++) {
      EXPECT_EQ(a[i].cameras[0].tags[k].corners, b[i].cameras[0].tags[k].corners);
      differs |= a[i].cameras[0].tags[k].corners != c[i].cameras[0].tags[k].corners;
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Simulator, TagNoiseDoesNotDependOnOtherTags)
{
  const Pose t1(rotX(0.2), Vector3(-0.3, 0, 1.5));
  const Pose t2(rotY(0.2), Vector3(0.3, 0, 1.5));
  const auto both = renderDetections(singleCameraSpec({{1, t1}, {2, t2}}, 1.0));
  const auto alone = renderDetections(singleCameraSpec({{2, t2}}, 1.0));
  ASSERT_NE(find(both[0], 2), nullptr);
  ASSERT_NE(find(alone[0], 2), nullptr);
  EXPECT_EQ(find(both[0], 2)->corners, find(alone[0], 2)->corners);
}

TEST(Simulator, NoiseFreeRigBlockRunRecoversTruth)
{
  const SimSpec spec = makeRigBlockScenario(20, 1, 0.0);
  Pipeline p(spec.scene);
  p.run(renderDetections(spec), renderOdometry(spec));
  for (const std::string body : {"rig", "block"}) {
    const auto traj = p.trajectory(body);
    ASSERT_EQ(traj.size(), 20u) << body;
    for (size_t i = 0; i < traj.size(); i++) {
      EXPECT_LT(test::translationError(traj[i].second, spec.bodyPose(body, i)), 1e-6);
      EXPECT_LT(test::rotationError(traj[i].second, spec.bodyPose(body, i)), 1e-6);
    }
  }
  for (const auto & e : p.tagMap()) {
    EXPECT_LT(test::translationError(e.pose, spec.tagTruth.at(e.id)), 1e-6) << e.id;
  }
  EXPECT_LT(p.totalError(), 1e-12);
}

TEST(Simulator, LoopWithoutTagsHasNoPoses)
{
  const SimSpec spec = makeLoopScenario(40.0, 0, 40, 1);
  Pipeline p(spec.scene);
  p.run(renderDetections(spec), renderOdometry(spec));
  EXPECT_THROW(p.trajectory("rig"), NoPoses);
  EXPECT_TRUE(p.tagMap().empty());
}

TEST(Simulator, LoadsScenarioDocuments)
{
  const SimSpec a = loadSimSpec("scenario: loop\nseed: 4\nn_frames: 50\nn_tags: 8\nsize_m: 30\n");
  EXPECT_EQ(a.stamps.size(), 50u);
  EXPECT_EQ(a.scene.tags.size(), 8u);
  EXPECT_EQ(a.seed, 4u);
  const SimSpec b = loadSimSpec("scenario: rig_block\nn_frames: 12\ncorner_noise: 0.5\n");
  EXPECT_EQ(b.stamps.size(), 12u);
  EXPECT_EQ(b.cornerNoise, 0.5);
  EXPECT_EQ(b.scene.tags.size(), 5u);
  EXPECT_THROW(loadSimSpec("scenario: maze\n"), ValidationError);
  EXPECT_THROW(loadSimSpec("seed: 1\n"), ValidationError);
  EXPECT_THROW(loadSimSpec("scenario: loop\nn_frames: 0\n"), ValidationError);
  EXPECT_THROW(loadSimSpec("scenario: [loop\n"), ParseError);
}

TEST(Simulator, InvalidSpecsAreRejected)
{
  SimSpec spec = makeRigBlockScenario(5, 1);
  spec.stamps[3] = spec.stamps[2];
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = makeRigBlockScenario(5, 1);
  spec.trajectories["block"].pop_back();
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = makeRigBlockScenario(5, 1);
  spec.odometry["lab"] = spec.odometry["rig"];
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = makeRigBlockScenario(5, 1);
  spec.cornerNoise = -1;
  EXPECT_THROW(renderDetections(spec), ValidationError);
}
