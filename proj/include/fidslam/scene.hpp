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

#ifndef FIDSLAM__SCENE_HPP_
#define FIDSLAM__SCENE_HPP_

#include <fidslam/camera.hpp>
#include <fidslam/noise.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fidslam
{
enum class BodyKind { Static, Dynamic };

// How the ambiguity ratio err_best / err_alt gates tag initialization.
//  Decisive: admit iff the view is oblique (angle >= max angle) or
//            ratio < 1 - ambiguity_ratio_threshold.
//  Literal:  reject iff ratio > ambiguity_ratio_threshold and the view
//            angle is below the max angle.
enum class AmbiguityRule { Decisive, Literal };

struct PosePrior
{
  Pose pose;
  PoseNoise noise;
  bool operator==(const PosePrior &) const = default;
};

struct Body
{
  std::string name;
  BodyKind kind{BodyKind::Static};
  std::optional<PosePrior> prior;  // world pose, static bodies only
  bool isDefaultTagBody{false};
  bool operator==(const Body &) const = default;
};

struct TagSpec
{
  int id{0};
  double size{0};
  std::string body;
  std::optional<PosePrior> prior;  // tag pose relative to body
  bool operator==(const TagSpec &) const = default;
};

struct CameraSpec
{
  std::string name;
  Intrinsics intrinsics;
  std::string rig;
  std::optional<PosePrior> extrinsicPrior;  // camera pose in rig
  bool operator==(const CameraSpec & o) const
  {
    const auto & a = intrinsics;
    const auto & b = o.intrinsics;
    return (
      name == o.name && rig == o.rig && extrinsicPrior == o.extrinsicPrior && a.fx == b.fx &&
      a.fy == b.fy && a.cx == b.cx && a.cy == b.cy && a.dist == b.dist && a.width == b.width &&
      a.height == b.height);
  }
};

struct Scene
{
  std::vector<Body> bodies;
  std::map<int, TagSpec> tags;
  std::vector<CameraSpec> cameras;
  double pixelNoise{1.0};
  double ambiguityRatioThreshold{0.3};
  double maxAmbiguousViewAngle{60.0};  // degrees
  AmbiguityRule ambiguityRule{AmbiguityRule::Decisive};
  double subgraphErrorThreshold{4.0};
  std::optional<double> defaultTagSize;

  const Body * findBody(const std::string & name) const;
  const CameraSpec * findCamera(const std::string & name) const;
  const Body * defaultTagBody() const;
  bool operator==(const Scene &) const = default;
};

// Parses and validates a YAML scene document.
// Throws ParseError for malformed input and ValidationError (message
// prefixed with the path of the offending entry) for invalid content.
Scene loadScene(const std::string & yaml);
Scene loadSceneFile(const std::string & path);
std::string serializeScene(const Scene & scene);

// Throws ValidationError.
void validateScene(const Scene & scene);

// Known tag, else a prior-less tag on the default body, else nothing.
std::optional<TagSpec> resolveTag(const Scene & scene, int tagId);

std::vector<std::string> validateSolvability(const Scene & scene);

std::string toString(AmbiguityRule r);
AmbiguityRule ambiguityRuleFromString(const std::string & s);
}  // namespace fidslam
#endif  // FIDSLAM__SCENE_HPP_
