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
#include <fidslam/scene.hpp>
#include <string>

using namespace fidslam;

namespace
{
const char * kPrior =
  "{position: [0, 0, 0], orientation: [0, 0, 0, 1], noise: [0.01, 0.01, 0.01, 0.01, 0.01, "
  "0.01]}";

std::string figOneScene()
{
  return (std::string(
            "format: fidslam-scene\n"
            "version: 1\n"
            "bodies:\n"
            "  - {name: lab, type: static, prior: ") +
          kPrior +
          "}\n"
          "  - {name: rig, type: dynamic}\n"
          "  - {name: block, type: dynamic}\n"
          "tags:\n"
          "  - {id: 2, size: 0.16, body: lab, prior: {position: [1, 0.5, 0], orientation: "
          "[0, 0, 0.7071067811865476, 0.7071067811865476], noise: [0.001, 0.001, 0.001, "
          "0.001, 0.001, 0.001]}}\n"
          "  - {id: 105, size: 0.05, body: block, prior: " +
          kPrior +
          "}\n"
          "cameras:\n"
          "  - name: cam0\n"
          "    rig: rig\n"
          "    intrinsics: {fx: 600, fy: 600, cx: 320, cy: 240, width: 640, height: 480,\n"
          "                 distortion_model: radtan, distortion: [-0.1, 0.01, 0.0, 0.0]}\n"
          "    extrinsic_prior: " +
          kPrior + "\n");
}

int countPriors(const Scene & s)
{
  int n = 0;
  for (const auto & b : s.bodies) {
    n += b.prior ? 1 : 0;
  }
  for (const auto & [id, t] : s.tags) {
    n += t.prior ? 1 : 0;
  }
  for (const auto & c : s.cameras) {
    n += c.extrinsicPrior ? 1 : 0;
  }
  return (n);
}

std::string expectValidationError(const std::string & yaml)
{
  try {
    loadScene(yaml);
  } catch (const ValidationError & e) {
    return (e.what());
  }
  ADD_FAILURE() << "expected ValidationError";
  return ("");
}
}  // namespace

TEST(Scene, MinimalConfig)
{
  const Scene s = loadScene(
    std::string("bodies:\n  - {name: rig, type: static, prior: ") + kPrior +
    "}\n"
    "cameras:\n"
    "  - {name: cam0, rig: rig, intrinsics: {fx: 500, fy: 500, cx: 320, cy: 240, width: 640,"
    " height: 480}, extrinsic_prior: " +
    kPrior + "}\n");
  EXPECT_EQ(s.bodies.size(), 1u);
  EXPECT_EQ(s.cameras.size(), 1u);
  EXPECT_EQ(s.pixelNoise, 1.0);
  EXPECT_EQ(s.ambiguityRatioThreshold, 0.3);
  EXPECT_EQ(s.maxAmbiguousViewAngle, 60.0);
  EXPECT_EQ(s.ambiguityRule, AmbiguityRule::Decisive);
  EXPECT_EQ(s.subgraphErrorThreshold, 4.0);
}

TEST(Scene, FigOneScenePriors)
{
  const Scene s = loadScene(figOneScene());
  EXPECT_EQ(s.bodies.size(), 3u);
  EXPECT_EQ(s.tags.size(), 2u);
  EXPECT_EQ(countPriors(s), 4);
  EXPECT_EQ(s.findBody("rig")->kind, BodyKind::Dynamic);
  EXPECT_EQ(s.tags.at(2).body, "lab");
  EXPECT_EQ(s.cameras[0].intrinsics.dist[0], -0.1);
  EXPECT_NEAR(s.tags.at(2).prior->pose.rotation().angle(), M_PI / 2, 1e-12);
  EXPECT_TRUE(validateSolvability(s).empty());
}

TEST(Scene, DuplicateTagId)
{
  const std::string msg = expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "tags:\n  - {id: 7, size: 0.1, body: lab}\n  - {id: 7, size: 0.2, body: lab}\n");
  EXPECT_NE(msg.find("duplicate tag id 7"), std::string::npos) << msg;
  EXPECT_NE(msg.find("tags[1]"), std::string::npos) << msg;
}

TEST(Scene, UnknownBodyReference)
{
  const std::string msg = expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "tags:\n  - {id: 3, size: 0.1, body: shelf}\n");
  EXPECT_NE(msg.find("tags[0].body"), std::string::npos) << msg;
  EXPECT_NE(msg.find("shelf"), std::string::npos) << msg;
  const std::string msg2 = expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "cameras:\n  - {name: c, rig: nowhere, intrinsics: {fx: 1, fy: 1, cx: 1, cy: 1, width: "
    "4, height: 4}}\n");
  EXPECT_NE(msg2.find("cameras[0].rig"), std::string::npos) << msg2;
}

TEST(Scene, NonPositiveTagSize)
{
  const std::string msg = expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "tags:\n  - {id: 3, size: 0, body: lab}\n");
  EXPECT_NE(msg.find("tags[0].size"), std::string::npos) << msg;
  expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "tags:\n  - {id: 3, size: -0.5, body: lab}\n");
}

TEST(Scene, OtherValidationErrors)
{
  // dynamic body with a prior
  expectValidationError(
    std::string("bodies:\n  - {name: rig, type: dynamic, prior: ") + kPrior + "}\n");
  // duplicate body name
  expectValidationError("bodies:\n  - {name: a, type: static}\n  - {name: a, type: dynamic}\n");
  // two default bodies
  expectValidationError(
    "default_tag_size: 0.1\nbodies:\n  - {name: a, type: static, default_tag_body: true}\n"
    "  - {name: b, type: static, default_tag_body: true}\n");
  // default body without default tag size
  expectValidationError("bodies:\n  - {name: a, type: static, default_tag_body: true}\n");
  // non-positive noise
  expectValidationError(
    "bodies:\n  - {name: a, type: static, prior: {position: [0,0,0], orientation: [0,0,0,1], "
    "noise: [0.1, 0.1, 0, 0.1, 0.1, 0.1]}}\n");
  // wrong vector length
  expectValidationError(
    "bodies:\n  - {name: a, type: static, prior: {position: [0,0], orientation: [0,0,0,1], "
    "noise: [0.1, 0.1, 0.1, 0.1, 0.1, 0.1]}}\n");
  // bad body type
  expectValidationError("bodies:\n  - {name: a, type: floating}\n");
  // bad ambiguity rule
  expectValidationError("ambiguity_rule: maybe\n");
  // principal point outside image
  expectValidationError(
    "bodies:\n  - {name: lab, type: static}\n"
    "cameras:\n  - {name: c, rig: lab, intrinsics: {fx: 1, fy: 1, cx: 10, cy: 1, width: 4, "
    "height: 4}}\n");
}

TEST(Scene, MalformedDocumentIsParseError)
{
  EXPECT_THROW(loadScene("bodies: [ {name: a"), ParseError);
  EXPECT_THROW(loadScene("- just\n- a list\n"), ParseError);
}

TEST(Scene, ResolveTag)
{
  Scene s = loadScene(figOneScene());
  const auto t2 = resolveTag(s, 2);
  ASSERT_TRUE(t2.has_value());
  EXPECT_EQ(*t2, s.tags.at(2));
  EXPECT_FALSE(resolveTag(s, 99).has_value());

  const Scene before = s;
  s.bodies[0].isDefaultTagBody = true;
  s.defaultTagSize = 0.12;
  validateScene(s);
  const auto t99 = resolveTag(s, 99);
  ASSERT_TRUE(t99.has_value());
  EXPECT_EQ(t99->id, 99);
  EXPECT_EQ(t99->body, "lab");
  EXPECT_EQ(t99->size, 0.12);
  EXPECT_FALSE(t99->prior.has_value());
  EXPECT_EQ(s.tags.count(99), 0u);  // the scene is not mutated
  (void)before;
}

TEST(Scene, Solvability)
{
  const Scene noPriors = loadScene(
    "bodies:\n  - {name: lab, type: static}\n  - {name: rig, type: dynamic}\n"
    "tags:\n  - {id: 1, size: 0.1, body: lab}\n");
  const auto w = validateSolvability(noPriors);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("gauge not fixed"), std::string::npos);

  // camera without extrinsics, but the world is anchored and tags carry priors
  Scene s = loadScene(figOneScene());
  s.cameras[0].extrinsicPrior.reset();
  EXPECT_TRUE(validateSolvability(s).empty());
}

TEST(Scene, SerializeRoundtrip)
{
  Scene s = loadScene(figOneScene());
  s.bodies[0].isDefaultTagBody = true;
  s.defaultTagSize = 0.1234567890123;
  s.ambiguityRule = AmbiguityRule::Literal;
  s.subgraphErrorThreshold = 7.25;
  s.tags.at(105).prior->pose = Pose(
    Rotation::exp(Vector3(0.1, -0.7, 2.9)), Vector3(1.0 / 3.0, -2.0 / 7.0, 1e-17));
  const std::string text = serializeScene(s);
  const Scene r = loadScene(text);
  EXPECT_EQ(r, s);
  EXPECT_EQ(serializeScene(r), text);
}

TEST(Scene, LoadIsDeterministic)
{
  EXPECT_EQ(loadScene(figOneScene()), loadScene(figOneScene()));
}
