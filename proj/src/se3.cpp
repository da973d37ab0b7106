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

#include <Eigen/SVD>
#include <cmath>
#include <fidslam/se3.hpp>

namespace fidslam
{
Eigen::Quaterniond Rotation::canonical(Eigen::Quaterniond q, bool forceNormalize)
{
  const double n2 = q.squaredNorm();
  if (forceNormalize || std::abs(n2 - 1.0) > 4.0 * Eigen::NumTraits<double>::epsilon()) {
    q.coeffs() /= std::sqrt(n2);
  }
  if (q.w() < 0) {
    q.coeffs() = -q.coeffs();
  }
  return (q);
}

Rotation Rotation::fromQuaternion(const Eigen::Quaterniond & q)
{
  return (Rotation(canonical(q, false)));
}

Rotation Rotation::fromMatrix(const Matrix3 & m)
{
  Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Matrix3 u = svd.matrixU();
    u.col(2) *= -1;
    r = u * svd.matrixV().transpose();
  }
  return (Rotation(canonical(Eigen::Quaterniond(r), true)));
}

Rotation Rotation::exp(const Vector3 & w)
{
  const double theta = w.norm();
  return (Rotation(canonical(
    theta < kSmallAngle ? detail::expTaylor(w) : detail::expExact(w), false)));
}

Vector3 Rotation::log() const
{
  // q_ has w >= 0, so the angle below is in [0, pi]
  const double s = q_.vec().norm();
  const double theta = 2.0 * std::atan2(s, q_.w());
  return (theta < kSmallAngle ? detail::logTaylor(q_) : detail::logExact(q_));
}

double Rotation::angle() const { return (2.0 * std::atan2(q_.vec().norm(), q_.w())); }

Rotation Rotation::inverse() const { return (Rotation(q_.conjugate())); }

Rotation Rotation::operator*(const Rotation & b) const
{
  return (Rotation(canonical(q_ * b.q_, true)));
}

Pose Pose::fromMatrix(const Eigen::Matrix4d & m)
{
  return (Pose(Rotation::fromMatrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()));
}

Eigen::Matrix4d Pose::matrix() const
{
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.matrix();
  m.topRightCorner<3, 1>() = translation_;
  return (m);
}

Pose Pose::inverse() const
{
  const Rotation ri = rotation_.inverse();
  return (Pose(ri, -(ri * translation_)));
}

Pose Pose::operator*(const Pose & b) const
{
  return (Pose(rotation_ * b.rotation_, rotation_ * b.translation_ + translation_));
}

Pose compose(const Pose & a, const Pose & b) { return (a * b); }
Pose inverse(const Pose & a) { return (a.inverse()); }
Vector3 logRotation(const Rotation & r) { return (r.log()); }
Rotation expRotation(const Vector3 & w) { return (Rotation::exp(w)); }
Vector3 transformPoint(const Pose & a, const Vector3 & x) { return (a * x); }

Twist ominus(const Pose & a, const Pose & b)
{
  const Pose rel = b.inverse() * a;
  Twist d;
  d << rel.rotation().log(), rel.translation();
  return (d);
}

Pose retract(const Pose & a, const Twist & delta)
{
  return (a * Pose(Rotation::exp(delta.head<3>()), delta.tail<3>()));
}

Matrix3 skew(const Vector3 & v)
{
  Matrix3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return (m);
}

Matrix3 rightJacobianInverse(const Vector3 & phi)
{
  const double theta = phi.norm();
  const Matrix3 p = skew(phi);
  double c = 0;
  if (theta < 1e-4) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return (Matrix3::Identity() + 0.5 * p + c * p * p);
}

namespace detail
{
Vector3 logTaylor(const Eigen::Quaterniond & q)
{
  // 2 atan(s/w) / s = (2/w) (1 - x^2/3 + x^4/5), x = s/w
  const double w = q.w();
  const double x2 = q.vec().squaredNorm() / (w * w);
  return ((2.0 / w) * (1.0 - x2 / 3.0 + x2 * x2 / 5.0) * q.vec());
}

Vector3 logExact(const Eigen::Quaterniond & q)
{
  const double s = q.vec().norm();
  const double theta = 2.0 * std::atan2(s, q.w());
  return ((theta / s) * q.vec());
}

Eigen::Quaterniond expTaylor(const Vector3 & w)
{
  const double t2 = w.squaredNorm();
  const double c = 1.0 - t2 / 8.0 + t2 * t2 / 384.0;
  const double k = 0.5 - t2 / 48.0 + t2 * t2 / 3840.0;
  return (Eigen::Quaterniond(c, k * w.x(), k * w.y(), k * w.z()));
}

Eigen::Quaterniond expExact(const Vector3 & w)
{
  const double theta = w.norm();
  const double k = std::sin(0.5 * theta) / theta;
  return (Eigen::Quaterniond(std::cos(0.5 * theta), k * w.x(), k * w.y(), k * w.z()));
}
}  // namespace detail
}  // namespace fidslam
