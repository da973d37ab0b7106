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

#include <cmath>
#include <fidslam/se3.hpp>

#include "test_util.hpp"

using namespace fidslam;
using test::randomPose;
using test::randomRotation;
using test::rotX;
using test::rotZ;

namespace
{
// Rodrigues formula, independent of the quaternion code path
Matrix3 rodrigues(const Vector3 & w)
{
  const double t = w.norm();
  if (t == 0) {
    return (Matrix3::Identity());
  }
  const Matrix3 K = skew(w / t);
  return (Matrix3::Identity() + std::sin(t) * K + (1 - std::cos(t)) * K * K);
}

// matrix logarithm via trace and antisymmetric part; valid for angles in (0, pi)
Vector3 matrixLog(const Matrix3 & R)
{
  const double t = std::acos(std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0));
  const Matrix3 A = (R - R.transpose()) * (t / (2.0 * std::sin(t)));
  return (Vector3(A(2, 1), A(0, 2), A(1, 0)));
}

double maxAbs(const Eigen::MatrixXd & m) { return (m.cwiseAbs().maxCoeff()); }
}  // namespace

TEST(Se3, ComposeIdentity)
{
  const Pose p = compose(Pose::identity(), Pose::identity());
  EXPECT_LT(ominus(p, Pose::identity()).norm(), 1e-15);
}

TEST(Se3, ComposeMatchesMatrixProduct)
{
  const Pose a(rotZ(M_PI / 2), Vector3(1, 0, 0));
  const Pose b = Pose::fromTranslation(Vector3(0, 1, 0));
  const Pose c = compose(a, b);
  EXPECT_LT((c.matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((c.translation() - Vector3(0, 0, 0)).norm(), 1e-15);
  EXPECT_LT((c.rotation().log() - Vector3(0, 0, M_PI / 2)).norm(), 1e-15);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; i++) {
    const Pose x = randomPose(rng);
    const Pose y = randomPose(rng);
    EXPECT_LT(maxAbs(compose(x, y).matrix() - x.matrix() * y.matrix()), 1e-12);
  }
}

TEST(Se3, InverseCases)
{
  EXPECT_LT(ominus(inverse(Pose::identity()), Pose::identity()).norm(), 1e-15);
  const Pose inv = inverse(Pose::fromTranslation(Vector3(1, 2, 3)));
  EXPECT_LT((inv.translation() - Vector3(-1, -2, -3)).norm(), 1e-15);
  EXPECT_LT(inv.rotation().angle(), 1e-15);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; i++) {
    const Pose p = randomPose(rng);
    EXPECT_LT(ominus(compose(p, inverse(p)), Pose::identity()).norm(), 1e-9);
    EXPECT_LT(ominus(compose(inverse(p), p), Pose::identity()).norm(), 1e-9);
  }
}

TEST(Se3, LogRotationCases)
{
  EXPECT_EQ(logRotation(Rotation()), Vector3::Zero());
  EXPECT_LT((logRotation(rotZ(M_PI / 2)) - Vector3(0, 0, M_PI / 2)).norm(), 1e-15);
  const Rotation r180 = Rotation::fromMatrix(rodrigues(Vector3(M_PI, 0, 0)));
  const Vector3 w = logRotation(r180);
  EXPECT_NEAR(std::abs(w.x()), M_PI, 1e-9);
  EXPECT_NEAR(w.tail<2>().norm(), 0, 1e-9);
  EXPECT_LT(maxAbs(rodrigues(w) - rodrigues(Vector3(M_PI, 0, 0))), 1e-9);
}

TEST(Se3, ExpRotationCases)
{
  EXPECT_LT(expRotation(Vector3::Zero()).angle(), 1e-15);
  EXPECT_LT(maxAbs(expRotation(Vector3(0, 0, M_PI / 2)).matrix() - rodrigues(Vector3(0, 0, M_PI / 2))), 1e-15);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; i++) {
    const Vector3 w = test::randomVector(rng, 1.5);
    EXPECT_LT(maxAbs(expRotation(w).matrix() - rodrigues(w)), 1e-14);
  }
}

TEST(Se3, ExpLogRoundtrip)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0.0, M_PI - 0.01);
  double worst = 0;
  for (int i = 0; i < 1000; i++) {
    const Vector3 axis = randomRotation(rng) * Vector3::UnitX();
    const Vector3 w = ang(rng) * axis;
    worst = std::max(worst, (logRotation(expRotation(w)) - w).norm());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Se3, RoundtripNearPi)
{
  std::mt19937_64 rng(5);
  for (double d : {1e-3, 1e-5, 1e-7, 1e-9}) {
    const Vector3 axis = randomRotation(rng) * Vector3::UnitZ();
    const Vector3 w = (M_PI - d) * axis;
    EXPECT_LT((logRotation(expRotation(w)) - w).norm(), 1e-9) << d;
  }
}

TEST(Se3, LogMatchesMatrixOracle)
{
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; i++) {
    const Rotation r = randomRotation(rng);
    if (r.angle() < 1e-3 || r.angle() > M_PI - 1e-3) {
      continue;
    }
    EXPECT_LT((logRotation(r) - matrixLog(r.matrix())).norm(), 1e-9);
  }
}

TEST(Se3, PrincipalBranch)
{
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; i++) {
    EXPECT_LE(logRotation(randomRotation(rng)).norm(), M_PI + 1e-15);
  }
}

TEST(Se3, TaylorContinuity)
{
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; i++) {
    const Vector3 axis = randomRotation(rng) * Vector3::UnitY();
    for (double t : {kSmallAngle * (1 - 1e-9), kSmallAngle, kSmallAngle * (1 + 1e-9)}) {
      const Vector3 w = t * axis;
      const Eigen::Quaterniond a = detail::expTaylor(w);
      const Eigen::Quaterniond b = detail::expExact(w);
      EXPECT_LT((a.coeffs() - b.coeffs()).norm(), 1e-12);
      EXPECT_LT((detail::logTaylor(b) - detail::logExact(b)).norm(), 1e-12);
      EXPECT_LT((detail::logTaylor(a) - w).norm(), 1e-12);
    }
  }
}

TEST(Se3, UnitNormAfterOperations)
{
  std::mt19937_64 rng(9);
  Pose p = randomPose(rng);
  for (int i = 0; i < 10000; i++) {
    p = compose(p, randomPose(rng));
  }
  EXPECT_NEAR(p.rotation().quaternion().norm(), 1.0, 1e-9);
  EXPECT_NEAR(p.rotation().matrix().determinant(), 1.0, 1e-9);
  EXPECT_LT(maxAbs(p.rotation().matrix() * p.rotation().matrix().transpose() - Matrix3::Identity()), 1e-9);
}

TEST(Se3, FromMatrixRejectsReflection)
{
  Matrix3 m = Matrix3::Identity();
  m(2, 2) = -1;
  EXPECT_NEAR(Rotation::fromMatrix(m).matrix().determinant(), 1.0, 1e-12);
}

TEST(Se3, OminusCases)
{
  std::mt19937_64 rng(10);
  const Pose t = randomPose(rng);
  EXPECT_LT(ominus(t, t).norm(), 1e-12);
  Twist expected;
  expected << 0, 0, 0, 1, 0, 0;
  EXPECT_LT((ominus(Pose::fromTranslation(Vector3(1, 0, 0)), Pose::identity()) - expected).norm(), 1e-15);
}

TEST(Se3, OminusMatchesMatrixOracle)
{
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; i++) {
    const Pose a = randomPose(rng);
    const Pose b = randomPose(rng);
    const Eigen::Matrix4d rel = b.matrix().inverse() * a.matrix();
    const Matrix3 R = rel.topLeftCorner<3, 3>();
    const double angle = std::acos(std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0));
    if (angle < 1e-3 || angle > M_PI - 1e-3) {
      continue;
    }
    Twist oracle;
    oracle << matrixLog(R), rel.topRightCorner<3, 1>();
    EXPECT_LT((ominus(a, b) - oracle).norm(), 1e-9);
  }
}

TEST(Se3, OminusZeroIffEqual)
{
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; i++) {
    const Pose a = randomPose(rng);
    const Pose b = randomPose(rng);
    EXPECT_GT(ominus(a, b).norm(), 1e-6);
    EXPECT_LT(ominus(a, a).norm(), 1e-12);
  }
}

TEST(Se3, OminusLeftInvariance)
{
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; i++) {
    const Pose a = randomPose(rng);
    const Pose b = randomPose(rng);
    const Pose g = randomPose(rng);
    const Twist d = ominus(a, b);
    const Twist dg = ominus(compose(g, a), compose(g, b));
    EXPECT_NEAR(d.head<3>().norm(), dg.head<3>().norm(), 1e-9);
    EXPECT_NEAR(d.tail<3>().norm(), dg.tail<3>().norm(), 1e-9);
  }
}

TEST(Se3, ComposeAssociative)
{
  std::mt19937_64 rng(14);
  for (int i = 0; i < 500; i++) {
    const Pose a = randomPose(rng);
    const Pose b = randomPose(rng);
    const Pose c = randomPose(rng);
    EXPECT_LT(ominus(compose(compose(a, b), c), compose(a, compose(b, c))).norm(), 1e-9);
  }
}

TEST(Se3, RetractCases)
{
  std::mt19937_64 rng(15);
  const Pose p = randomPose(rng);
  EXPECT_LT(ominus(retract(p, Twist::Zero()), p).norm(), 1e-15);
  Twist d;
  d << 0, 0, M_PI / 2, 0, 0, 0;
  EXPECT_LT(ominus(retract(Pose::identity(), d), Pose(rotZ(M_PI / 2), Vector3::Zero())).norm(), 1e-15);
}

TEST(Se3, RetractFirstOrder)
{
  std::mt19937_64 rng(16);
  for (int i = 0; i < 1000; i++) {
    const Pose p = randomPose(rng);
    Twist d;
    d << test::randomVector(rng, 1.0), test::randomVector(rng, 1.0);
    d *= 1e-6 / d.norm();
    EXPECT_LT((ominus(retract(p, d), p) - d).norm(), 1e-9);
  }
}

TEST(Se3, TransformPointCases)
{
  const Vector3 x(0.3, -1, 2);
  EXPECT_EQ(transformPoint(Pose::identity(), x), x);
  EXPECT_LT((transformPoint(Pose::fromTranslation(Vector3(1, 2, 3)), x) - (x + Vector3(1, 2, 3))).norm(), 1e-15);
  EXPECT_LT((transformPoint(Pose(rotZ(M_PI / 2), Vector3::Zero()), Vector3(1, 0, 0)) - Vector3(0, 1, 0)).norm(), 1e-15);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; i++) {
    const Pose p = randomPose(rng);
    EXPECT_LT((transformPoint(p, x) - (p.matrix() * x.homogeneous()).head<3>()).norm(), 1e-12);
  }
}

TEST(Se3, RotXHalfTurnLog)
{
  const Vector3 w = logRotation(rotX(M_PI));
  EXPECT_NEAR(w.norm(), M_PI, 1e-12);
}
