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

#ifndef FIDSLAM__NOISE_HPP_
#define FIDSLAM__NOISE_HPP_

#include <fidslam/se3.hpp>

namespace fidslam
{
// Diagonal pose noise: standard deviations for rotation (rad, x3) then
// translation (m, x3), in the same order as the ominus twist.
struct PoseNoise
{
  Vector6 sigma{Vector6::Ones()};

  static PoseNoise isotropic(double rotation, double translation)
  {
    PoseNoise n;
    n.sigma << rotation, rotation, rotation, translation, translation, translation;
    return (n);
  }
  bool valid() const { return ((sigma.array() > 0).all() && sigma.allFinite()); }
  bool operator==(const PoseNoise & o) const { return (sigma == o.sigma); }
};

inline bool operator==(const Pose & a, const Pose & b)
{
  return (
    a.rotation().quaternion().coeffs() == b.rotation().quaternion().coeffs() &&
    a.translation() == b.translation());
}
}  // namespace fidslam
#endif  // FIDSLAM__NOISE_HPP_
