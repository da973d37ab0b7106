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

#ifndef FIDSLAM__SE3_HPP_
#define FIDSLAM__SE3_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fidslam
{
using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

// Lie algebra coordinates of a pose difference: rotation first
// (radians, vee of the rotation log), then raw translation (meters).
using Twist = Vector6;

// Rotation angles below this use the Taylor expansions in exp/log.
constexpr double kSmallAngle = 1e-6;

// Element of SO(3), stored as a unit quaternion with non-negative
// scalar part.
class Rotation
{
public:
  Rotation() = default;

  // Renormalizes only if q is not already unit length to machine
  // precision, so stored unit quaternions reload bit-identically.
  static Rotation fromQuaternion(const Eigen::Quaterniond & q);
  // Projects m onto SO(3) before conversion.
  static Rotation fromMatrix(const Matrix3 & m);
  static Rotation exp(const Vector3 & w);

  // principal branch, angle in [0, pi]
  Vector3 log() const;
  double angle() const;

  Matrix3 matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond & quaternion() const { return q_; }

  Rotation inverse() const;
  Rotation operator*(const Rotation & b) const;
  Vector3 operator*(const Vector3 & x) const { return q_ * x; }

private:
  explicit Rotation(const Eigen::Quaterniond & q) : q_(q) {}
  static Eigen::Quaterniond canonical(Eigen::Quaterniond q, bool forceNormalize);
  Eigen::Quaterniond q_{1.0, 0.0, 0.0, 0.0};
};

// Rigid transform T_B_A taking coordinates in frame A to frame B.
class Pose
{
public:
  Pose() = default;
  Pose(const Rotation & r, const Vector3 & t) : rotation_(r), translation_(t) {}

  static Pose identity() { return Pose(); }
  static Pose fromTranslation(const Vector3 & t) { return Pose(Rotation(), t); }
  static Pose fromMatrix(const Eigen::Matrix4d & m);

  const Rotation & rotation() const { return rotation_; }
  const Vector3 & translation() const { return translation_; }
  Eigen::Matrix4d matrix() const;

  Pose inverse() const;
  // (a * b) applies b first, then a
  Pose operator*(const Pose & b) const;
  Vector3 operator*(const Vector3 & x) const { return rotation_ * x + translation_; }

private:
  Rotation rotation_;
  Vector3 translation_{Vector3::Zero()};
};

Pose compose(const Pose & a, const Pose & b);
Pose inverse(const Pose & a);
Vector3 logRotation(const Rotation & r);
Rotation expRotation(const Vector3 & w);
Vector3 transformPoint(const Pose & a, const Vector3 & x);

// a (-) b = [log(Rot(b^-1 a)); Trans(b^-1 a)]
Twist ominus(const Pose & a, const Pose & b);

// a * [exp(w), t]; the update matching ominus, i.e.
// ominus(retract(a, d), a) == d
Pose retract(const Pose & a, const Twist & delta);

Matrix3 skew(const Vector3 & v);
// Inverse of the SO(3) right Jacobian: d log(R exp(w)) / dw at w = 0
Matrix3 rightJacobianInverse(const Vector3 & phi);

namespace detail
{
// branches of the log map, exposed for continuity tests
Vector3 logTaylor(const Eigen::Quaterniond & q);
Vector3 logExact(const Eigen::Quaterniond & q);
Eigen::Quaterniond expTaylor(const Vector3 & w);
Eigen::Quaterniond expExact(const Vector3 & w);
}  // namespace detail
}  // namespace fidslam
#endif  // FIDSLAM__SE3_HPP_
