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

#ifndef FIDSLAM__YAML_UTIL_HPP_
#define FIDSLAM__YAML_UTIL_HPP_

#include <yaml-cpp/yaml.h>

#include <fidslam/errors.hpp>
#include <fidslam/noise.hpp>
#include <fidslam/scene.hpp>
#include <string>
#include <vector>

namespace fidslam
{
namespace yaml_util
{
template <typename T>
T get(const YAML::Node & n, const std::string & key, const std::string & path)
{
  const YAML::Node v = n[key];
  if (!v) {
    throw ValidationError(path + "." + key + ": missing");
  }
  try {
    return (v.as<T>());
  } catch (const YAML::Exception & e) {
    throw ValidationError(path + "." + key + ": bad value");
  }
}

template <typename T>
T getOr(const YAML::Node & n, const std::string & key, const T & def, const std::string & path)
{
  return (n[key] ? get<T>(n, key, path) : def);
}

inline std::vector<double> getVec(
  const YAML::Node & n, const std::string & key, size_t len, const std::string & path)
{
  const auto v = get<std::vector<double>>(n, key, path);
  if (v.size() != len) {
    throw ValidationError(
      path + "." + key + ": expected " + std::to_string(len) + " values, got " +
      std::to_string(v.size()));
  }
  return (v);
}

inline Pose parsePose(const YAML::Node & n, const std::string & path)
{
  const auto p = getVec(n, "position", 3, path);
  const auto q = getVec(n, "orientation", 4, path);  // x y z w
  const Eigen::Quaterniond quat(q[3], q[0], q[1], q[2]);
  if (!(quat.norm() > 1e-6)) {
    throw ValidationError(path + ".orientation: zero quaternion");
  }
  return (Pose(Rotation::fromQuaternion(quat), Vector3(p[0], p[1], p[2])));
}

inline PosePrior parsePrior(const YAML::Node & n, const std::string & path)
{
  PosePrior pp;
  pp.pose = parsePose(n, path);
  const auto s = getVec(n, "noise", 6, path);
  for (int i = 0; i < 6; i++) {
    pp.noise.sigma(i) = s[i];
  }
  if (!pp.noise.valid()) {
    throw ValidationError(path + ".noise: standard deviations must be positive");
  }
  return (pp);
}

inline void emitVec(YAML::Emitter & e, const std::string & key, const std::vector<double> & v)
{
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const double x : v) {
    e << x;
  }
  e << YAML::EndSeq;
}

inline void emitPose(YAML::Emitter & e, const Pose & p)
{
  const auto & q = p.rotation().quaternion();
  const auto & t = p.translation();
  emitVec(e, "position", {t.x(), t.y(), t.z()});
  emitVec(e, "orientation", {q.x(), q.y(), q.z(), q.w()});
}

inline void emitPrior(YAML::Emitter & e, const std::string & key, const PosePrior & pp)
{
  e << YAML::Key << key << YAML::Value << YAML::BeginMap;
  emitPose(e, pp.pose);
  const auto & s = pp.noise.sigma;
  emitVec(e, "noise", {s(0), s(1), s(2), s(3), s(4), s(5)});
  e << YAML::EndMap;
}

inline YAML::Node parseDocument(const std::string & text)
{
  try {
    return (YAML::Load(text));
  } catch (const YAML::Exception & e) {
    throw ParseError(std::string("malformed YAML: ") + e.what());
  }
}
}  // namespace yaml_util
}  // namespace fidslam
#endif  // FIDSLAM__YAML_UTIL_HPP_
