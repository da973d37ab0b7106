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

#include <Eigen/LU>
#include <cmath>
#include <fidslam/camera.hpp>
#include <fidslam/errors.hpp>
#include <sstream>

namespace fidslam
{
void Intrinsics::validate() const
{
  std::stringstream ss;
  if (!(fx > 0 && fy > 0)) {
    ss << "focal lengths must be positive, got fx=" << fx << " fy=" << fy;
  } else if (width <= 0 || height <= 0) {
    ss << "image size must be positive, got " << width << "x" << height;
  } else if (!(cx >= 0 && cx < width && cy >= 0 && cy < height)) {
    ss << "principal point (" << cx << ", " << cy << ") outside image";
  }
  if (!ss.str().empty()) {
    throw ValidationError(ss.str());
  }
}

Vector2 distort(const Intrinsics & k, const Vector2 & xn, Eigen::Matrix2d * jac)
{
  const double x = xn.x();
  const double y = xn.y();
  const auto [k1, k2, p1, p2] = k.dist;
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (k1 + k2 * r2);
  const Vector2 xd(
    x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x),
    y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y);
  if (jac) {
    // d radial / dx = (k1 + 2 k2 r2) * 2x
    const double dr = k1 + 2.0 * k2 * r2;
    (*jac)(0, 0) = radial + x * dr * 2.0 * x + 2.0 * p1 * y + 6.0 * p2 * x;
    (*jac)(0, 1) = x * dr * 2.0 * y + 2.0 * p1 * x + 2.0 * p2 * y;
    (*jac)(1, 0) = y * dr * 2.0 * x + 2.0 * p1 * x + 2.0 * p2 * y;
    (*jac)(1, 1) = radial + y * dr * 2.0 * y + 6.0 * p1 * y + 2.0 * p2 * x;
  }
  return (xd);
}

Vector2 project(const Intrinsics & k, const Vector3 & x, Eigen::Matrix<double, 2, 3> * jac)
{
  if (!(x.z() > 1e-9)) {
    std::stringstream ss;
    ss << "point behind camera: z = " << x.z();
    throw PointBehindCamera(ss.str());
  }
  const double iz = 1.0 / x.z();
  const Vector2 xn(x.x() * iz, x.y() * iz);
  Eigen::Matrix2d dd;
  const Vector2 xd = distort(k, xn, jac ? &dd : nullptr);
  if (jac) {
    Eigen::Matrix<double, 2, 3> dn;
    dn << iz, 0, -xn.x() * iz, 0, iz, -xn.y() * iz;
    Eigen::Matrix2d f;
    f << k.fx, 0, 0, k.fy;
    *jac = f * dd * dn;
  }
  return (Vector2(k.fx * xd.x() + k.cx, k.fy * xd.y() + k.cy));
}

Vector2 undistort(const Intrinsics & k, const Vector2 & pixel)
{
  const Vector2 target((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy);
  if (!k.hasDistortion()) {
    return (target);
  }
  Vector2 xn = target;
  for (int i = 0; i < 50; i++) {
    Eigen::Matrix2d j;
    const Vector2 err = distort(k, xn, &j) - target;
    const Vector2 step = j.partialPivLu().solve(err);
    xn -= step;
    if (step.norm() < 1e-15) {
      break;
    }
  }
  return (xn);
}

Vector3 backProject(const Intrinsics & k, const Vector2 & pixel)
{
  const Vector2 xn = undistort(k, pixel);
  return (Vector3(xn.x(), xn.y(), 1.0).normalized());
}

ObjectCorners tagObjectCorners(double l)
{
  if (!(l > 0)) {
    std::stringstream ss;
    ss << "tag size must be positive, got " << l;
    throw NonPositiveSize(ss.str());
  }
  const double h = 0.5 * l;
  return {Vector3(-h, -h, 0), Vector3(h, -h, 0), Vector3(h, h, 0), Vector3(-h, h, 0)};
}

double pixelArea(const Corners & c)
{
  double a = 0;
  for (size_t i = 0; i < c.size(); i++) {
    const auto & p = c[i];
    const auto & q = c[(i + 1) % c.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return (std::abs(0.5 * a));
}

bool insideImage(const Intrinsics & k, const Vector2 & p)
{
  return (p.x() >= 0 && p.y() >= 0 && p.x() <= k.width - 1 && p.y() <= k.height - 1);
}
}  // namespace fidslam
