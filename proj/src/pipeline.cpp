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

#include <algorithm>
#include <cmath>
#include <fidslam/errors.hpp>
#include <fidslam/pipeline.hpp>
#include <set>

namespace fidslam
{
static constexpr double kStampTolerance = 1e-6;  // seconds

static InitializerConfig makeConfig(const Scene & scene, const PipelineOptions & o)
{
  InitializerConfig c = InitializerConfig::fromScene(scene);
  if (o.ambiguityRule) {
    c.ambiguityRule = *o.ambiguityRule;
  }
  if (o.window < 0) {
    throw ValidationError("window: must be >= 0");
  }
  c.window = o.window;
  c.optimizer = o.optimizer;
  return (c);
}

Pipeline::Pipeline(const Scene & scene, const PipelineOptions & options)
: scene_(scene), state_(makeConfig(scene, options))
{
  validateScene(scene_);
  // startup round: the scene's absolute priors
  std::vector<FactorPtr> priors;
  for (const auto & b : scene_.bodies) {
    if (b.prior) {
      priors.push_back(state_.makeFactor(
        AbsolutePosePrior{VariableKey::staticBody(b.name), b.prior->pose, b.prior->noise}));
    }
  }
  for (const auto & [id, t] : scene_.tags) {
    if (t.prior) {
      priors.push_back(
        state_.makeFactor(AbsolutePosePrior{VariableKey::tag(id), t.prior->pose, t.prior->noise}));
    }
  }
  for (const auto & c : scene_.cameras) {
    if (c.extrinsicPrior) {
      priors.push_back(state_.makeFactor(AbsolutePosePrior{
        VariableKey::camera(c.name), c.extrinsicPrior->pose, c.extrinsicPrior->noise}));
    }
  }
  processNewFactors(state_, priors, -1);
}

VariableKey Pipeline::bodyKey(const std::string & body, int64_t frame) const
{
  const Body * b = scene_.findBody(body);
  if (!b) {
    throw UnknownBody("unknown body " + body);
  }
  return (
    b->kind == BodyKind::Dynamic ? VariableKey::dynamicBody(body, frame)
                                 : VariableKey::staticBody(body));
}

std::string Pipeline::tagBody(int id) const
{
  const auto it = scene_.tags.find(id);
  if (it != scene_.tags.end()) {
    return (it->second.body);
  }
  const auto d = discoveredTags_.find(id);
  return (d != discoveredTags_.end() ? d->second.body : std::string());
}

std::vector<std::string> Pipeline::dynamicBodies() const
{
  std::vector<std::string> names;
  for (const auto & b : scene_.bodies) {
    if (b.kind == BodyKind::Dynamic) {
      names.push_back(b.name);
    }
  }
  return (names);
}

DiagnosticsRecord Pipeline::describe(const Factor & f, double stamp) const
{
  DiagnosticsRecord r;
  r.stamp = stamp;
  r.kind = f.kind();
  if (const TagProjection * p = f.projection()) {
    r.camera = p->camera;
    r.tag = p->tagId;
    r.body = p->body.name;
  } else if (const auto * a = std::get_if<AbsolutePosePrior>(&f.data)) {
    switch (a->target.kind) {
      case VariableKind::TagInBody:
        r.tag = a->target.id;
        r.body = tagBody(a->target.id);
        break;
      case VariableKind::CameraInRig:
        r.camera = a->target.name;
        break;
      default:
        r.body = a->target.name;
    }
  } else {
    r.body = std::get<RelativePosePrior>(f.data).a.name;
  }
  return (r);
}

RoundReport Pipeline::ingestFrame(
  const DetectionFrame & frame, const std::vector<OdometrySample> & odometry)
{
  if (!std::isfinite(frame.stamp)) {
    throw ValidationError("frame stamp is not finite");
  }
  if (!stamps_.empty() && !(frame.stamp > stamps_.back())) {
    throw OutOfOrderFrame(
      "frame stamp " + std::to_string(frame.stamp) + " does not follow " +
      std::to_string(stamps_.back()));
  }
  const int64_t t = numFrames();
  std::vector<FactorPtr> factors;
  for (const auto & o : odometry) {
    const Body * b = scene_.findBody(o.body);
    if (!b || b->kind != BodyKind::Dynamic) {
      throw ValidationError("odometry: body " + o.body + " is not a dynamic body");
    }
    if (!o.noise.valid()) {
      throw ValidationError("odometry: noise must be positive");
    }
    if (t == 0) {
      continue;  // no previous pose to relate to
    }
    factors.push_back(state_.makeFactor(RelativePosePrior{
      VariableKey::dynamicBody(o.body, t), VariableKey::dynamicBody(o.body, t - 1), o.delta,
      o.noise}));
  }
  for (const auto & cd : frame.cameras) {
    const CameraSpec * cam = scene_.findCamera(cd.camera);
    if (!cam) {
      throw ValidationError("detections: unknown camera " + cd.camera);
    }
    std::set<int> seen;
    for (const auto & d : cd.tags) {
      if (!seen.insert(d.id).second) {
        throw ValidationError(
          "detections: tag " + std::to_string(d.id) + " seen twice by camera " + cd.camera);
      }
      for (const auto & c : d.corners) {
        if (!c.allFinite()) {
          throw ValidationError("detections: non-finite corner for tag " + std::to_string(d.id));
        }
      }
      std::optional<TagSpec> spec = resolveTag(scene_, d.id);
      if (!spec) {
        continue;  // tags without association are ignored
      }
      if (!scene_.tags.count(d.id)) {
        discoveredTags_.emplace(d.id, *spec);
      }
      TagProjection p;
      p.body = bodyKey(spec->body, t);
      p.cam = VariableKey::camera(cam->name);
      p.tag = VariableKey::tag(d.id);
      p.rig = bodyKey(cam->rig, t);
      p.corners = d.corners;
      p.camera = cam->name;
      p.tagId = d.id;
      p.frame = t;
      p.tagSize = spec->size;
      p.sigma = scene_.pixelNoise;
      p.intrinsics = cam->intrinsics;
      factors.push_back(state_.makeFactor(std::move(p)));
    }
  }
  stamps_.push_back(frame.stamp);
  RoundReport rep = processNewFactors(state_, factors, t);
  for (const auto & r : rep.records) {
    DiagnosticsRecord d = describe(*state_.full().factor(r.factorId), frame.stamp);
    d.error = r.error;
    d.verdict = r.verdict;
    d.rotations = r.rotations;
    diagnostics_.push_back(std::move(d));
  }
  return (rep);
}

void Pipeline::run(
  const std::vector<DetectionFrame> & frames, const std::vector<OdometrySample> & odom)
{
  std::vector<OdometrySample> sorted(odom);
  std::stable_sort(
    sorted.begin(), sorted.end(),
    [](const OdometrySample & a, const OdometrySample & b) { return (a.stamp < b.stamp); });
  size_t j = 0;
  for (const auto & f : frames) {
    std::vector<OdometrySample> matched;
    if (j < sorted.size() && sorted[j].stamp < f.stamp - kStampTolerance) {
      throw ValidationError(
        "odometry: sample at " + std::to_string(sorted[j].stamp) + " matches no frame");
    }
    while (j < sorted.size() && std::abs(sorted[j].stamp - f.stamp) <= kStampTolerance) {
      matched.push_back(sorted[j++]);
    }
    ingestFrame(f, matched);
  }
  if (j < sorted.size()) {
    throw ValidationError(
      "odometry: sample at " + std::to_string(sorted[j].stamp) + " matches no frame");
  }
}

Trajectory Pipeline::trajectory(const std::string & body) const
{
  const Body * b = scene_.findBody(body);
  if (!b || b->kind != BodyKind::Dynamic) {
    throw UnknownBody("no dynamic body named " + body);
  }
  Trajectory traj;
  for (int64_t t = 0; t < numFrames(); t++) {
    const VariableKey k = VariableKey::dynamicBody(body, t);
    if (state_.isDetermined(k)) {
      traj.emplace_back(stamps_[t], state_.optimized().value(k));
    }
  }
  if (traj.empty()) {
    throw NoPoses("body " + body + " has no determined poses");
  }
  return (traj);
}

std::vector<TagMapEntry> Pipeline::tagMap() const
{
  std::vector<TagMapEntry> map;
  for (const auto & [k, v] : state_.optimized().variables()) {
    if (k.kind != VariableKind::TagInBody || !v) {
      continue;
    }
    TagMapEntry e;
    e.id = k.id;
    const auto it = scene_.tags.find(k.id);
    const TagSpec & spec = it != scene_.tags.end() ? it->second : discoveredTags_.at(k.id);
    e.body = spec.body;
    e.size = spec.size;
    e.fromPrior = spec.prior.has_value();
    e.pose = *v;
    map.push_back(e);
  }
  return (map);
}

double Pipeline::totalError() const
{
  Graph g = state_.optimized();
  return (g.totalError());
}
}  // namespace fidslam
