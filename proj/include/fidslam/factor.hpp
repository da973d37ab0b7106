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

#ifndef FIDSLAM__FACTOR_HPP_
#define FIDSLAM__FACTOR_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <fidslam/camera.hpp>
#include <fidslam/noise.hpp>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fidslam
{
enum class VariableKind { CameraInRig = 0, TagInBody = 1, StaticBody = 2, DynamicBody = 3 };

struct VariableKey
{
  VariableKind kind{VariableKind::StaticBody};
  std::string name;   // camera or body name
  int id{-1};         // tag id
  int64_t time{-1};   // frame index, dynamic bodies only

  static VariableKey camera(const std::string & name)
  {
    return (VariableKey{VariableKind::CameraInRig, name, -1, -1});
  }
  static VariableKey tag(int id) { return (VariableKey{VariableKind::TagInBody, "", id, -1}); }
  static VariableKey staticBody(const std::string & name)
  {
    return (VariableKey{VariableKind::StaticBody, name, -1, -1});
  }
  static VariableKey dynamicBody(const std::string & name, int64_t t)
  {
    return (VariableKey{VariableKind::DynamicBody, name, -1, t});
  }
  bool isDynamic() const { return (kind == VariableKind::DynamicBody); }
  std::string str() const;
  auto operator<=>(const VariableKey &) const = default;
};

struct AbsolutePosePrior
{
  VariableKey target;
  Pose mean;
  PoseNoise noise;
};

// residual: (T_b^-1 T_a) (-) delta
struct RelativePosePrior
{
  VariableKey a;
  VariableKey b;
  Pose delta;
  PoseNoise noise;
};

// Variables: world-from-body, rig-from-camera, body-from-tag, world-from-rig.
// body and rig may be the same variable when a camera sees a tag on its own rig.
struct TagProjection
{
  VariableKey body;
  VariableKey cam;
  VariableKey tag;
  VariableKey rig;
  Corners corners;
  std::string camera;
  int tagId{0};
  int64_t frame{0};
  double tagSize{0};
  double sigma{1.0};
  Intrinsics intrinsics;
};

enum class FactorKind { AbsolutePrior, RelativePrior, Projection };

struct Factor
{
  uint64_t id{0};
  std::variant<AbsolutePosePrior, RelativePosePrior, TagProjection> data;
  // temporary prior holding an already determined variable in place
  bool pin{false};

  FactorKind kind() const { return (static_cast<FactorKind>(data.index())); }
  // variable slots in evaluation order, may contain repeated keys
  std::vector<VariableKey> keys() const;
  int dim() const { return (kind() == FactorKind::Projection ? 8 : 6); }
  int arity() const;
  const TagProjection * projection() const { return (std::get_if<TagProjection>(&data)); }
};

using FactorPtr = std::shared_ptr<const Factor>;

std::string toString(FactorKind k);

// Residual (whitened) and per-slot Jacobians. The Jacobian of slot i is
// taken with respect to the twist delta of retract(value_i, delta).
struct Linearization
{
  int dim{0};
  int slots{0};
  Eigen::Matrix<double, 8, 1> r{Eigen::Matrix<double, 8, 1>::Zero()};
  std::array<Eigen::Matrix<double, 8, 6>, 4> J;
};

Vector6 residualAbsolute(const AbsolutePosePrior & f, const Pose & T);
Vector6 residualRelative(const RelativePosePrior & f, const Pose & Ta, const Pose & Tb);
// throws PointBehindCamera
Eigen::Matrix<double, 8, 1> residualProjection(
  const TagProjection & f, const Pose & wBody, const Pose & rigCam, const Pose & bodyTag,
  const Pose & wRig);

// values are given in slot order (see Factor::keys()).
// throws PointBehindCamera for projection factors.
void linearize(
  const Factor & f, const std::array<const Pose *, 4> & values, Linearization * lin,
  bool withJacobians = true);
}  // namespace fidslam
#endif  // FIDSLAM__FACTOR_HPP_
