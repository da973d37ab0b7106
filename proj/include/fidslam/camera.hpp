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

#ifndef FIDSLAM__CAMERA_HPP_
#define FIDSLAM__CAMERA_HPP_

#include <array>
#include <fidslam/se3.hpp>

namespace fidslam
{
using Corners = std::array<Vector2, 4>;
using ObjectCorners = std::array<Vector3, 4>;

// Pinhole camera with radial-tangential distortion [k1, k2, p1, p2]
// applied in normalized image coordinates.
struct Intrinsics
{
  double fx{0};
  double fy{0};
  double cx{0};
  double cy{0};
  std::array<double, 4> dist{0, 0, 0, 0};
  int width{0};
  int height{0};

  // throws ValidationError
  void validate() const;
  bool hasDistortion() const { return (dist != std::array<double, 4>{0, 0, 0, 0}); }
};

// Normalized (undistorted) coordinates to distorted normalized coordinates.
// If jac is given it receives d(distorted)/d(normalized).
Vector2 distort(const Intrinsics & k, const Vector2 & xn, Eigen::Matrix2d * jac = nullptr);

// Camera-frame point to pixel. Throws PointBehindCamera if z <= 1e-9.
Vector2 project(const Intrinsics & k, const Vector3 & x, Eigen::Matrix<double, 2, 3> * jac = nullptr);

// Pixel to undistorted normalized coordinates (Newton iteration).
Vector2 undistort(const Intrinsics & k, const Vector2 & pixel);

// Pixel to unit-length viewing ray in camera coordinates.
Vector3 backProject(const Intrinsics & k, const Vector2 & pixel);

// Tag corners s1..s4 in the tag frame for side length l, counter-clockwise
// seen from the +z side. Throws NonPositiveSize if l <= 0.
ObjectCorners tagObjectCorners(double l);

// absolute shoelace area
double pixelArea(const Corners & c);

bool insideImage(const Intrinsics & k, const Vector2 & p);
}  // namespace fidslam
#endif  // FIDSLAM__CAMERA_HPP_
