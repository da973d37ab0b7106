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

#include <yaml-cpp/yaml.h>

#include <fidslam/errors.hpp>
#include <fidslam/scene.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "yaml_util.hpp"

namespace fidslam
{
using yaml_util::get;
using yaml_util::getOr;
using yaml_util::getVec;
using yaml_util::parsePrior;

static const char * kSceneFormat = "fidslam-scene";
static constexpr int kSceneVersion = 1;

const Body * Scene::findBody(const std::string & name) const
{
  for (const auto & b : bodies) {
    if (b.name == name) {
      return (&b);
    }
  }
  return (nullptr);
}

const CameraSpec * Scene::findCamera(const std::string & name) const
{
  for (const auto & c : cameras) {
    if (c.name == name) {
      return (&c);
    }
  }
  return (nullptr);
}

const Body * Scene::defaultTagBody() const
{
  for (const auto & b : bodies) {
    if (b.isDefaultTagBody) {
      return (&b);
    }
  }
  return (nullptr);
}

std::string toString(AmbiguityRule r)
{
  return (r == AmbiguityRule::Decisive ? "decisive" : "literal");
}

AmbiguityRule ambiguityRuleFromString(const std::string & s)
{
  if (s == "decisive") {
    return (AmbiguityRule::Decisive);
  }
  if (s == "literal") {
    return (AmbiguityRule::Literal);
  }
  throw ValidationError("ambiguity_rule: must be 'decisive' or 'literal', got '" + s + "'");
}

static Body parseBody(const YAML::Node & n, const std::string & path)
{
  Body b;
  b.name = get<std::string>(n, "name", path);
  const auto type = get<std::string>(n, "type", path);
  if (type == "static") {
    b.kind = BodyKind::Static;
  } else if (type == "dynamic") {
    b.kind = BodyKind::Dynamic;
  } else {
    throw ValidationError(path + ".type: must be 'static' or 'dynamic', got '" + type + "'");
  }
  b.isDefaultTagBody = getOr<bool>(n, "default_tag_body", false, path);
  if (n["prior"]) {
    b.prior = parsePrior(n["prior"], path + ".prior");
  }
  return (b);
}

static TagSpec parseTag(const YAML::Node & n, const std::string & path)
{
  TagSpec t;
  t.id = get<int>(n, "id", path);
  t.size = get<double>(n, "size", path);
  t.body = get<std::string>(n, "body", path);
  if (n["prior"]) {
    t.prior = parsePrior(n["prior"], path + ".prior");
  }
  return (t);
}

static Intrinsics parseIntrinsics(const YAML::Node & n, const std::string & path)
{
  if (!n || !n.IsMap()) {
    throw ValidationError(path + ": missing");
  }
  Intrinsics k;
  k.fx = get<double>(n, "fx", path);
  k.fy = get<double>(n, "fy", path);
  k.cx = get<double>(n, "cx", path);
  k.cy = get<double>(n, "cy", path);
  k.width = get<int>(n, "width", path);
  k.height = get<int>(n, "height", path);
  const auto model = getOr<std::string>(n, "distortion_model", "radtan", path);
  if (model != "radtan") {
    throw ValidationError(path + ".distortion_model: unsupported model '" + model + "'");
  }
  if (n["distortion"]) {
    const auto d = getVec(n, "distortion", 4, path);
    std::copy(d.begin(), d.end(), k.dist.begin());
  }
  try {
    k.validate();
  } catch (const ValidationError & e) {
    throw ValidationError(path + ": " + e.what());
  }
  return (k);
}

static CameraSpec parseCamera(const YAML::Node & n, const std::string & path)
{
  CameraSpec c;
  c.name = get<std::string>(n, "name", path);
  c.rig = get<std::string>(n, "rig", path);
  c.intrinsics = parseIntrinsics(n["intrinsics"], path + ".intrinsics");
  if (n["extrinsic_prior"]) {
    c.extrinsicPrior = parsePrior(n["extrinsic_prior"], path + ".extrinsic_prior");
  }
  return (c);
}

template <typename F>
static void forEach(const YAML::Node & root, const std::string & key, F f)
{
  const YAML::Node seq = root[key];
  if (!seq) {
    return;
  }
  if (!seq.IsSequence()) {
    throw ValidationError(key + ": must be a list");
  }
  for (size_t i = 0; i < seq.size(); i++) {
    f(seq[i], key + "[" + std::to_string(i) + "]");
  }
}

Scene loadScene(const std::string & yaml)
{
  const YAML::Node root = yaml_util::parseDocument(yaml);
  if (!root.IsMap()) {
    throw ParseError("scene document must be a mapping");
  }
  const std::string path = "scene";
  const auto fmt = getOr<std::string>(root, "format", kSceneFormat, path);
  if (fmt != kSceneFormat) {
    throw ValidationError("format: expected '" + std::string(kSceneFormat) + "', got '" + fmt + "'");
  }
  const int version = getOr<int>(root, "version", kSceneVersion, path);
  if (version != kSceneVersion) {
    throw ValidationError("version: unsupported version " + std::to_string(version));
  }
  Scene s;
  s.pixelNoise = getOr<double>(root, "pixel_noise", s.pixelNoise, path);
  s.ambiguityRatioThreshold =
    getOr<double>(root, "ambiguity_ratio_threshold", s.ambiguityRatioThreshold, path);
  s.maxAmbiguousViewAngle =
    getOr<double>(root, "max_ambiguous_view_angle", s.maxAmbiguousViewAngle, path);
  s.ambiguityRule =
    ambiguityRuleFromString(getOr<std::string>(root, "ambiguity_rule", "decisive", path));
  s.subgraphErrorThreshold =
    getOr<double>(root, "subgraph_error_threshold", s.subgraphErrorThreshold, path);
  if (root["default_tag_size"]) {
    s.defaultTagSize = get<double>(root, "default_tag_size", path);
  }
  forEach(root, "bodies", [&s](const YAML::Node & n, const std::string & p) {
    s.bodies.push_back(parseBody(n, p));
  });
  std::set<int> seen;
  forEach(root, "tags", [&](const YAML::Node & n, const std::string & p) {
    TagSpec t = parseTag(n, p);
    if (!seen.insert(t.id).second) {
      throw ValidationError(p + ".id: duplicate tag id " + std::to_string(t.id));
    }
    if (t.size <= 0) {
      throw ValidationError(p + ".size: non-positive tag size for tag " + std::to_string(t.id));
    }
    if (!s.findBody(t.body)) {
      throw ValidationError(p + ".body: unknown body '" + t.body + "'");
    }
    s.tags[t.id] = t;
  });
  forEach(root, "cameras", [&s](const YAML::Node & n, const std::string & p) {
    s.cameras.push_back(parseCamera(n, p));
  });
  validateScene(s);
  return (s);
}

Scene loadSceneFile(const std::string & path)
{
  std::ifstream f(path);
  if (!f) {
    throw ParseError("cannot open scene file: " + path);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return (loadScene(ss.str()));
}

void validateScene(const Scene & s)
{
  std::set<std::string> names;
  const Body * defaultBody = nullptr;
  for (size_t i = 0; i < s.bodies.size(); i++) {
    const auto & b = s.bodies[i];
    const std::string p = "bodies[" + std::to_string(i) + "]";
    if (b.name.empty()) {
      throw ValidationError(p + ".name: empty body name");
    }
    if (!names.insert(b.name).second) {
      throw ValidationError(p + ".name: duplicate body name '" + b.name + "'");
    }
    if (b.kind == BodyKind::Dynamic && b.prior) {
      throw ValidationError(p + ".prior: dynamic body '" + b.name + "' cannot carry a prior");
    }
    if (b.prior && !b.prior->noise.valid()) {
      throw ValidationError(p + ".prior.noise: standard deviations must be positive");
    }
    if (b.isDefaultTagBody) {
      if (defaultBody) {
        throw ValidationError(p + ".default_tag_body: more than one default tag body");
      }
      defaultBody = &b;
    }
  }
  if (defaultBody && !(s.defaultTagSize && *s.defaultTagSize > 0)) {
    throw ValidationError("default_tag_size: required and positive when a default tag body exists");
  }
  size_t i = 0;
  for (const auto & [id, t] : s.tags) {
    const std::string p = "tags[" + std::to_string(i++) + "]";
    if (id != t.id) {
      throw ValidationError(p + ".id: inconsistent tag id " + std::to_string(t.id));
    }
    if (t.id < 0) {
      throw ValidationError(p + ".id: negative tag id " + std::to_string(t.id));
    }
    if (!(t.size > 0)) {
      throw ValidationError(p + ".size: non-positive tag size for tag " + std::to_string(t.id));
    }
    if (!s.findBody(t.body)) {
      throw ValidationError(p + ".body: unknown body '" + t.body + "'");
    }
    if (t.prior && !t.prior->noise.valid()) {
      throw ValidationError(p + ".prior.noise: standard deviations must be positive");
    }
  }
  std::set<std::string> camNames;
  for (size_t j = 0; j < s.cameras.size(); j++) {
    const auto & c = s.cameras[j];
    const std::string p = "cameras[" + std::to_string(j) + "]";
    if (c.name.empty()) {
      throw ValidationError(p + ".name: empty camera name");
    }
    if (!camNames.insert(c.name).second) {
      throw ValidationError(p + ".name: duplicate camera name '" + c.name + "'");
    }
    if (!s.findBody(c.rig)) {
      throw ValidationError(p + ".rig: unknown body '" + c.rig + "'");
    }
    if (c.extrinsicPrior && !c.extrinsicPrior->noise.valid()) {
      throw ValidationError(p + ".extrinsic_prior.noise: standard deviations must be positive");
    }
    try {
      c.intrinsics.validate();
    } catch (const ValidationError & e) {
      throw ValidationError(p + ".intrinsics: " + e.what());
    }
  }
  if (!(s.pixelNoise > 0)) {
    throw ValidationError("pixel_noise: must be positive");
  }
  if (!(s.ambiguityRatioThreshold >= 0 && s.ambiguityRatioThreshold <= 1)) {
    throw ValidationError("ambiguity_ratio_threshold: must be in [0, 1]");
  }
  if (!(s.maxAmbiguousViewAngle >= 0 && s.maxAmbiguousViewAngle <= 90)) {
    throw ValidationError("max_ambiguous_view_angle: must be in [0, 90] degrees");
  }
  if (!(s.subgraphErrorThreshold > 0)) {
    throw ValidationError("subgraph_error_threshold: must be positive");
  }
}

std::string serializeScene(const Scene & s)
{
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "format" << YAML::Value << kSceneFormat;
  e << YAML::Key << "version" << YAML::Value << kSceneVersion;
  e << YAML::Key << "pixel_noise" << YAML::Value << s.pixelNoise;
  e << YAML::Key << "ambiguity_ratio_threshold" << YAML::Value << s.ambiguityRatioThreshold;
  e << YAML::Key << "max_ambiguous_view_angle" << YAML::Value << s.maxAmbiguousViewAngle;
  e << YAML::Key << "ambiguity_rule" << YAML::Value << toString(s.ambiguityRule);
  e << YAML::Key << "subgraph_error_threshold" << YAML::Value << s.subgraphErrorThreshold;
  if (s.defaultTagSize) {
    e << YAML::Key << "default_tag_size" << YAML::Value << *s.defaultTagSize;
  }
  e << YAML::Key << "bodies" << YAML::Value << YAML::BeginSeq;
  for (const auto & b : s.bodies) {
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << b.name;
    e << YAML::Key << "type" << YAML::Value
      << (b.kind == BodyKind::Static ? "static" : "dynamic");
    if (b.isDefaultTagBody) {
      e << YAML::Key << "default_tag_body" << YAML::Value << true;
    }
    if (b.prior) {
      yaml_util::emitPrior(e, "prior", *b.prior);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "tags" << YAML::Value << YAML::BeginSeq;
  for (const auto & [id, t] : s.tags) {
    e << YAML::BeginMap;
    e << YAML::Key << "id" << YAML::Value << id;
    e << YAML::Key << "size" << YAML::Value << t.size;
    e << YAML::Key << "body" << YAML::Value << t.body;
    if (t.prior) {
      yaml_util::emitPrior(e, "prior", *t.prior);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "cameras" << YAML::Value << YAML::BeginSeq;
  for (const auto & c : s.cameras) {
    const auto & k = c.intrinsics;
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << c.name;
    e << YAML::Key << "rig" << YAML::Value << c.rig;
    e << YAML::Key << "intrinsics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "fx" << YAML::Value << k.fx;
    e << YAML::Key << "fy" << YAML::Value << k.fy;
    e << YAML::Key << "cx" << YAML::Value << k.cx;
    e << YAML::Key << "cy" << YAML::Value << k.cy;
    e << YAML::Key << "width" << YAML::Value << k.width;
    e << YAML::Key << "height" << YAML::Value << k.height;
    e << YAML::Key << "distortion_model" << YAML::Value << "radtan";
    yaml_util::emitVec(e, "distortion", {k.dist.begin(), k.dist.end()});
    e << YAML::EndMap;
    if (c.extrinsicPrior) {
      yaml_util::emitPrior(e, "extrinsic_prior", *c.extrinsicPrior);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  return (std::string(e.c_str()) + "\n");
}

std::optional<TagSpec> resolveTag(const Scene & s, int tagId)
{
  const auto it = s.tags.find(tagId);
  if (it != s.tags.end()) {
    return (it->second);
  }
  const Body * db = s.defaultTagBody();
  if (db == nullptr || !s.defaultTagSize) {
    return (std::nullopt);
  }
  TagSpec t;
  t.id = tagId;
  t.size = *s.defaultTagSize;
  t.body = db->name;
  return (t);
}

std::vector<std::string> validateSolvability(const Scene & s)
{
  // The world frame is anchored only by priors on static bodies. Tag and
  // camera priors are relative to their bodies and cannot fix the gauge
  // on their own.
  std::vector<std::string> warnings;
  bool anchored = false;
  for (const auto & b : s.bodies) {
    anchored = anchored || (b.kind == BodyKind::Static && b.prior);
  }
  if (!anchored) {
    warnings.push_back("gauge not fixed: no static body carries a world pose prior");
  }
  return (warnings);
}
}  // namespace fidslam
