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

#ifndef FIDSLAM__PLANAR_POSE_HPP_
#define FIDSLAM__PLANAR_POSE_HPP_

#include <array>
#include <fidslam/camera.hpp>
#include <fidslam/scene.hpp>

namespace fidslam
{
// Result of resolving the two-fold ambiguity of a single planar tag.
// Poses are tag-in-camera (camera-from-tag).
struct AmbiguousPose
{
  Pose best;
  Pose alternate;
  double errBest{0};  // RMS reprojection error [px]
  double errAlt{0};   // +inf if there is no distinct second minimum
  double ratio{0};    // errBest / errAlt, in [0, 1]
  double viewAngle{0};  // degrees between ray to tag center and tag normal
  bool alternateValid{false};
};

using PlanePoints = std::array<Vector2, 4>;

// DLT with Hartley normalization, scaled such that H(2,2) = 1.
// throws DegenerateConfiguration
Matrix3 homographyFrom4Points(const PlanePoints & obj, const PlanePoints & img);

// The two planar pose candidates (tag-in-camera) explaining a homography
// from the tag plane (z = 0) to normalized image coordinates. Candidates
// with the tag center behind the camera are dropped; the first element is
// always valid. throws NoValidPose
std::vector<Pose> poseCandidatesFromHomography(const Matrix3 & H);

// Minimizes the pixel reprojection error of the four corners over the
// tag-in-camera pose. Returns the RMS error in pixels, or +inf if the pose
// puts a corner behind the camera.
double refineTagPose(
  const Intrinsics & k, const Corners & corners, double tagSize, Pose * camTag,
  int maxIterations = 50);

double reprojectionRms(
  const Intrinsics & k, const Corners & corners, double tagSize, const Pose & camTag);

double viewAngleDeg(const Pose & camTag);

// throws NoValidPose, DegenerateConfiguration, NonPositiveSize
AmbiguousPose ambiguityCheck(const Corners & corners, const Intrinsics & k, double tagSize);

bool isUnambiguous(
  const AmbiguousPose & a, AmbiguityRule rule, double ratioThreshold, double maxAngleDeg);
bool isUnambiguous(const AmbiguousPose & a, const Scene & scene);
}  // namespace fidslam
#endif  // FIDSLAM__PLANAR_POSE_HPP_
