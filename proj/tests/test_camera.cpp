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

#include <fidslam/camera.hpp>
#include <fidslam/errors.hpp>

#include "test_util.hpp"

using namespace fidslam;

namespace
{
// scalar radial-tangential model written out independently
void scalarDistort(const std::array<double, 4> & d, double x, double y, double * xd, double * yd)
{
  const double r2 = x * x + y * y;
  const double r4 = r2 * r2;
  const double radial = 1 + d[0] * r2 + d[1] * r4;
  *xd = x * radial + 2 * d[2] * x * y + d[3] * (r2 + 2 * x * x);
  *yd = y * radial + d[2] * (r2 + 2 * y * y) + 2 * d[3] * x * y;
}

double triangleArea(const Vector2 & a, const Vector2 & b, const Vector2 & c)
{
  const Vector2 u = b - a;
  const Vector2 v = c - a;
  return (0.5 * std::abs(u.x() * v.y() - u.y() * v.x()));
}
}  // namespace

TEST(Camera, ProjectPrincipalPoint)
{
  const Intrinsics k = test::testIntrinsics();
  EXPECT_LT((project(k, Vector3(0, 0, 2)) - Vector2(320, 240)).norm(), 1e-12);
  EXPECT_LT((project(k, Vector3(1, 0, 2)) - Vector2(620, 240)).norm(), 1e-12);
}

TEST(Camera, ProjectDistortionMatchesScalarOracle)
{
  Intrinsics k = test::testIntrinsics();
  k.dist = {0.1, 0, 0, 0};
  double xd = 0;
  double yd = 0;
  scalarDistort(k.dist, 0.5, 0.0, &xd, &yd);
  EXPECT_LT((project(k, Vector3(1, 0, 2)) - Vector2(600 * xd + 320, 600 * yd + 240)).norm(), 1e-12);

  k = test::testIntrinsics(true);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; i++) {
    const Vector3 x = test::randomVector(rng, 0.5) + Vector3(0, 0, 2);
    scalarDistort(k.dist, x.x() / x.z(), x.y() / x.z(), &xd, &yd);
    EXPECT_LT((project(k, x) - Vector2(600 * xd + 320, 600 * yd + 240)).norm(), 1e-12);
  }
}

TEST(Camera, ProjectBehindCameraThrows)
{
  const Intrinsics k = test::testIntrinsics();
  EXPECT_THROW(project(k, Vector3(0, 0, 0)), PointBehindCamera);
  EXPECT_THROW(project(k, Vector3(0, 0, -1)), PointBehindCamera);
  EXPECT_THROW(project(k, Vector3(1, 0, 1e-10)), PointBehindCamera);
}

TEST(Camera, ProjectJacobianFiniteDifference)
{
  std::mt19937_64 rng(2);
  for (const bool distorted : {false, true}) {
    const Intrinsics k = test::testIntrinsics(distorted);
    for (int i = 0; i < 500; i++) {
      const Vector3 x = test::randomVector(rng, 0.6) + Vector3(0, 0, 1.5);
      Eigen::Matrix<double, 2, 3> J;
      project(k, x, &J);
      Eigen::Matrix<double, 2, 3> Jfd;
      const double h = 1e-6;
      for (int j = 0; j < 3; j++) {
        Vector3 xp = x;
        Vector3 xm = x;
        xp(j) += h;
        xm(j) -= h;
        Jfd.col(j) = (project(k, xp) - project(k, xm)) / (2 * h);
      }
      const double scale = std::max(1.0, Jfd.cwiseAbs().maxCoeff());
      EXPECT_LT((J - Jfd).cwiseAbs().maxCoeff() / scale, 1e-5);
    }
  }
}

TEST(Camera, BackProjectRecoversDirection)
{
  std::mt19937_64 rng(3);
  for (const bool distorted : {false, true}) {
    const Intrinsics k = test::testIntrinsics(distorted);
    for (int i = 0; i < 500; i++) {
      const Vector3 x = test::randomVector(rng, 0.5) + Vector3(0, 0, 2);
      const Vector3 ray = backProject(k, project(k, x));
      EXPECT_LT((ray - x.normalized()).norm(), distorted ? 1e-9 : 1e-12);
    }
  }
}

TEST(Camera, TagObjectCorners)
{
  const auto c = tagObjectCorners(0.16);
  const std::array<Vector3, 4> expected{
    Vector3(-0.08, -0.08, 0), Vector3(0.08, -0.08, 0), Vector3(0.08, 0.08, 0),
    Vector3(-0.08, 0.08, 0)};
  for (int i = 0; i < 4; i++) {
    EXPECT_LT((c[i] - expected[i]).norm(), 1e-15);
  }
  const auto c2 = tagObjectCorners(2.0);
  for (const auto & p : c2) {
    EXPECT_EQ(std::abs(p.x()), 1.0);
    EXPECT_EQ(std::abs(p.y()), 1.0);
  }
  EXPECT_THROW(tagObjectCorners(0), NonPositiveSize);
  EXPECT_THROW(tagObjectCorners(-1), NonPositiveSize);
}

TEST(Camera, TagCornersCounterClockwiseWithAreaL2)
{
  for (double l : {0.05, 0.16, 1.0, 2.0}) {
    const auto c = tagObjectCorners(l);
    double signedArea = 0;
    for (int i = 0; i < 4; i++) {
      const auto & p = c[i];
      const auto & q = c[(i + 1) % 4];
      signedArea += 0.5 * (p.x() * q.y() - q.x() * p.y());
    }
    EXPECT_GT(signedArea, 0);
    EXPECT_NEAR(signedArea, l * l, 1e-15);
  }
}

TEST(Camera, PixelArea)
{
  EXPECT_EQ(pixelArea({Vector2(0, 0), Vector2(1, 0), Vector2(1, 1), Vector2(0, 1)}), 1.0);
  EXPECT_EQ(pixelArea({Vector2(0, 0), Vector2(1, 1), Vector2(2, 2), Vector2(3, 3)}), 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  std::uniform_real_distribution<double> a(0, 2 * M_PI);
  for (int i = 0; i < 500; i++) {
    // random convex quad: points on an ellipse at sorted angles
    std::array<double, 4> t{a(rng), a(rng), a(rng), a(rng)};
    std::sort(t.begin(), t.end());
    const double rx = u(rng);
    const double ry = u(rng);
    Corners c;
    for (int j = 0; j < 4; j++) {
      c[j] = Vector2(300 + rx * std::cos(t[j]), 200 + ry * std::sin(t[j]));
    }
    const double oracle = triangleArea(c[0], c[1], c[2]) + triangleArea(c[0], c[2], c[3]);
    // rounding scales with the magnitude of the coordinate products
    const double scale = std::max(1.0, 4 * 300.0 * std::max(rx, ry));
    EXPECT_NEAR(pixelArea(c), oracle, 1e-12 * std::max(scale, oracle));
  }
}

TEST(Camera, IntrinsicsValidation)
{
  Intrinsics k = test::testIntrinsics();
  EXPECT_NO_THROW(k.validate());
  k.fx = 0;
  EXPECT_THROW(k.validate(), ValidationError);
  k = test::testIntrinsics();
  k.cx = 640;
  EXPECT_THROW(k.validate(), ValidationError);
  k = test::testIntrinsics();
  k.height = 0;
  EXPECT_THROW(k.validate(), ValidationError);
}
