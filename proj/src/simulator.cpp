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

#include <cmath>
#include <fidslam/errors.hpp>
#include <fidslam/simulator.hpp>
#include <random>

#include "yaml_util.hpp"

namespace fidslam
{
namespace
{
enum class Stream : uint64_t { Corner = 1, Odometry = 2 };

// Counter-based draws: every (frame, camera, tag, corner) tuple gets its
// own generator, so the order of rendering never changes the noise.
std::mt19937_64 streamFor(uint64_t seed, Stream s, std::initializer_list<uint64_t> counter)
{
  std::vector<uint32_t> words{
    static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(s)};
  for (const uint64_t c : counter) {
    words.push_back(static_cast<uint32_t>(c));
    words.push_back(static_cast<uint32_t>(c >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return (std::mt19937_64(seq));
}

Rotation yaw(double a) { return (Rotation::exp(Vector3(0, 0, a))); }

// rotation whose columns are the given axes
Rotation fromAxes(const Vector3 & x, const Vector3 & y, const Vector3 & z)
{
  Matrix3 m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  return (Rotation::fromMatrix(m));
}

// camera looking from `eye` at `target`, image y pointing as far down as possible
Rotation lookAt(const Vector3 & eye, const Vector3 & target)
{
  const Vector3 z = (target - eye).normalized();
  const Vector3 x = z.cross(Vector3::UnitZ()).normalized();
  return (fromAxes(x, z.cross(x), z));
}

struct PathPoint
{
  Vector3 position;
  double heading{0};
};

// rounded square, counter-clockwise, starting at the origin heading +x
PathPoint roundedSquare(double s, double straight, double radius)
{
  const double arc = 0.5 * M_PI * radius;
  const double side = straight + arc;
  const double perimeter = 4 * side;
  s = std::fmod(std::fmod(s, perimeter) + perimeter, perimeter);
  Vector3 start = Vector3::Zero();
  for (int k = 0; k < 4; k++) {
    const double h = 0.5 * M_PI * k;
    const Vector3 d(std::cos(h), std::sin(h), 0);
    const Vector3 n(-std::sin(h), std::cos(h), 0);
    if (s <= straight) {
      return (PathPoint{start + s * d, h});
    }
    const Vector3 center = start + straight * d + radius * n;
    if (s <= side || k == 3) {
      const double phi = std::min((s - straight) / radius, 0.5 * M_PI);
      return (PathPoint{center + radius * (std::sin(phi) * d - std::cos(phi) * n), h + phi});
    }
    start = center + radius * d;
    s -= side;
  }
  return (PathPoint{start, 0});
}
}  // namespace

Pose SimSpec::bodyPose(const std::string & body, size_t frame) const
{
  const auto s = staticTruth.find(body);
  if (s != staticTruth.end()) {
    return (s->second);
  }
  const auto d = trajectories.find(body);
  if (d == trajectories.end() || frame >= d->second.size()) {
    throw UnknownBody("no ground truth for body " + body);
  }
  return (d->second[frame]);
}

void SimSpec::validate() const
{
  validateScene(scene);
  for (size_t i = 1; i < stamps.size(); i++) {
    if (!(stamps[i] > stamps[i - 1])) {
      throw ValidationError("stamps must be strictly increasing");
    }
  }
  for (const auto & b : scene.bodies) {
    if (b.kind == BodyKind::Static && !staticTruth.count(b.name)) {
      throw ValidationError("missing ground truth for static body " + b.name);
    }
    if (b.kind == BodyKind::Dynamic) {
      const auto it = trajectories.find(b.name);
      if (it == trajectories.end() || it->second.size() != stamps.size()) {
        throw ValidationError("trajectory of " + b.name + " must have one pose per frame");
      }
    }
  }
  for (const auto & [id, t] : scene.tags) {
    if (!tagTruth.count(id)) {
      throw ValidationError("missing ground truth for tag " + std::to_string(id));
    }
  }
  for (const auto & c : scene.cameras) {
    if (!cameraTruth.count(c.name)) {
      throw ValidationError("missing ground truth for camera " + c.name);
    }
  }
  for (const auto & [b, m] : odometry) {
    const Body * body = scene.findBody(b);
    if (!body || body->kind != BodyKind::Dynamic) {
      throw ValidationError("odometry for non-dynamic body " + b);
    }
    if (!m.reported.valid()) {
      throw ValidationError("odometry noise for " + b + " must be positive");
    }
  }
  if (!(cornerNoise >= 0) || !(minPixelArea >= 0)) {
    throw ValidationError("corner noise and minimum pixel area must be non-negative");
  }
}

std::vector<DetectionFrame> renderDetections(const SimSpec & spec)
{
  spec.validate();
  std::vector<DetectionFrame> frames;
  for (size_t i = 0; i < spec.stamps.size(); i++) {
    DetectionFrame f;
    f.stamp = spec.stamps[i];
    for (size_t ci = 0; ci < spec.scene.cameras.size(); ci++) {
      const CameraSpec & cam = spec.scene.cameras[ci];
      const Pose worldCam = spec.bodyPose(cam.rig, i) * spec.cameraTruth.at(cam.name);
      CameraDetections cd;
      cd.camera = cam.name;
      for (const auto & [id, tag] : spec.scene.tags) {
        const Pose camTag =
          worldCam.inverse() * spec.bodyPose(tag.body, i) * spec.tagTruth.at(id);
        const ObjectCorners s = tagObjectCorners(tag.size);
        Corners c;
        bool visible = true;
        for (int k = 0; k < 4 && visible; k++) {
          const Vector3 x = camTag * s[k];
          visible = x.z() > 1e-6;
          if (visible) {
            c[k] = project(cam.intrinsics, x);
            visible = insideImage(cam.intrinsics, c[k]);
          }
        }
        if (!visible || pixelArea(c) < spec.minPixelArea) {
          continue;
        }
        for (int k = 0; k < 4; k++) {
          auto gen = streamFor(spec.seed, Stream::Corner, {i, ci, static_cast<uint64_t>(id),
                                                           static_cast<uint64_t>(k)});
          std::normal_distribution<double> n(0.0, 1.0);
          const double du = n(gen);
          const double dv = n(gen);
          c[k] += spec.cornerNoise * Vector2(du, dv);
        }
        cd.tags.push_back(TagDetection{id, c});
      }
      f.cameras.push_back(std::move(cd));
    }
    frames.push_back(std::move(f));
  }
  return (frames);
}

std::vector<OdometrySample> renderOdometry(const SimSpec & spec, const std::string & body)
{
  spec.validate();
  const auto mit = spec.odometry.find(body);
  if (mit == spec.odometry.end()) {
    throw UnknownBody("no odometry model for body " + body);
  }
  const OdometryModel & m = mit->second;
  const Pose bias = Pose(Rotation::exp(m.bias.head<3>()), m.bias.tail<3>());
  uint64_t bodyIndex = 0;
  for (size_t i = 0; i < spec.scene.bodies.size(); i++) {
    if (spec.scene.bodies[i].name == body) {
      bodyIndex = i;
    }
  }
  std::vector<OdometrySample> out;
  for (size_t i = 1; i < spec.stamps.size(); i++) {
    const Pose delta = spec.bodyPose(body, i - 1).inverse() * spec.bodyPose(body, i);
    auto gen = streamFor(spec.seed, Stream::Odometry, {i, bodyIndex});
    std::normal_distribution<double> n(0.0, 1.0);
    Vector6 e;
    for (int k = 0; k < 6; k++) {
      e(k) = n(gen) * m.noiseSigma(k);
    }
    OdometrySample s;
    s.stamp = spec.stamps[i];
    s.body = body;
    s.delta = retract(delta * bias, e);
    s.noise = m.reported;
    out.push_back(s);
  }
  return (out);
}

std::vector<OdometrySample> renderOdometry(const SimSpec & spec)
{
  std::vector<OdometrySample> all;
  for (const auto & [body, m] : spec.odometry) {
    const auto o = renderOdometry(spec, body);
    all.insert(all.end(), o.begin(), o.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const OdometrySample & a, const OdometrySample & b) {
    return (a.stamp < b.stamp);
  });
  return (all);
}

Trajectory deadReckon(
  const SimSpec & spec, const std::vector<OdometrySample> & odom, const std::string & body)
{
  Trajectory traj;
  if (spec.stamps.empty()) {
    return (traj);
  }
  Pose p = spec.bodyPose(body, 0);
  traj.emplace_back(spec.stamps[0], p);
  for (const auto & s : odom) {
    if (s.body == body) {
      p = p * s.delta;
      traj.emplace_back(s.stamp, p);
    }
  }
  return (traj);
}

Trajectory groundTruth(const SimSpec & spec, const std::string & body)
{
  Trajectory traj;
  for (size_t i = 0; i < spec.stamps.size(); i++) {
    traj.emplace_back(spec.stamps[i], spec.bodyPose(body, i));
  }
  return (traj);
}

SimSpec makeLoopScenario(
  double sizeM, int nTags, int nFrames, uint64_t seed, const LoopOptions & o)
{
  if (!(sizeM > 0) || nTags < 0 || nFrames <= 0) {
    throw ValidationError("loop scenario: size and frame count must be positive");
  }
  const double straight = (sizeM - 2 * M_PI * o.cornerRadius) / 4;
  if (!(straight > 0)) {
    throw ValidationError("loop scenario: perimeter too small for the corner radius");
  }
  constexpr double height = 0.3;  // camera and tag center height
  SimSpec spec;
  spec.seed = seed;
  spec.cornerNoise = o.cornerNoise;
  Scene & sc = spec.scene;
  sc.bodies.push_back(
    Body{"lab", BodyKind::Static, PosePrior{Pose::identity(), PoseNoise::isotropic(1e-4, 1e-4)}, false});
  sc.bodies.push_back(Body{"rig", BodyKind::Dynamic, std::nullopt, false});
  spec.staticTruth["lab"] = Pose::identity();

  CameraSpec cam;
  cam.name = "cam0";
  cam.rig = "rig";
  cam.intrinsics.fx = cam.intrinsics.fy = o.focalLength;
  cam.intrinsics.cx = 320;
  cam.intrinsics.cy = 240;
  cam.intrinsics.width = 640;
  cam.intrinsics.height = 480;
  // looking to the right of the direction of travel: x_cam = -x_rig, y_cam = -z_rig
  const Pose rigCam(
    fromAxes(-Vector3::UnitX(), -Vector3::UnitZ(), -Vector3::UnitY()), Vector3(0.05, -0.1, height));
  cam.extrinsicPrior = PosePrior{rigCam, PoseNoise::isotropic(1e-3, 1e-3)};
  sc.cameras.push_back(cam);
  spec.cameraTruth["cam0"] = rigCam;

  for (int k = 0; k < nTags; k++) {
    const PathPoint p = roundedSquare(sizeM * (k + 0.5) / nTags, straight, o.cornerRadius);
    const Vector3 h(std::cos(p.heading), std::sin(p.heading), 0);
    const Vector3 out(h.y(), -h.x(), 0);  // right of travel, away from the loop
    const Pose tag(
      fromAxes(-h, -Vector3::UnitZ(), out), p.position + o.wallDistance * out + height * Vector3::UnitZ());
    TagSpec t;
    t.id = k;
    t.size = o.tagSize;
    t.body = "lab";
    if (o.priorEvery > 0 && k % o.priorEvery == 0) {
      t.prior = PosePrior{tag, PoseNoise::isotropic(1e-3, 1e-3)};
    }
    sc.tags[k] = t;
    spec.tagTruth[k] = tag;
  }
  auto & traj = spec.trajectories["rig"];
  for (int i = 0; i < nFrames; i++) {
    const PathPoint p = roundedSquare(sizeM * i / nFrames, straight, o.cornerRadius);
    traj.emplace_back(yaw(p.heading), p.position);
    spec.stamps.push_back(0.1 * i);
  }
  OdometryModel m;
  m.bias << 0, 0, o.yawBias, 0, 0, 0;
  m.noiseSigma << o.odomRotationNoise, o.odomRotationNoise, o.odomRotationNoise,
    o.odomTranslationNoise, o.odomTranslationNoise, o.odomTranslationNoise;
  m.reported = PoseNoise::isotropic(
    o.odomReportedRotation > 0 ? o.odomReportedRotation
                               : std::max(2.0 * o.odomRotationNoise + std::abs(o.yawBias), 1e-3),
    o.odomReportedTranslation > 0 ? o.odomReportedTranslation
                                  : std::max(2.0 * o.odomTranslationNoise, 1e-3));
  spec.odometry["rig"] = m;
  spec.validate();
  return (spec);
}

SimSpec makeRigBlockScenario(int nFrames, uint64_t seed, double cornerNoise)
{
  if (nFrames <= 0) {
    throw ValidationError("rig/block scenario: frame count must be positive");
  }
  SimSpec spec;
  spec.seed = seed;
  spec.cornerNoise = cornerNoise;
  Scene & sc = spec.scene;
  sc.bodies.push_back(
    Body{"lab", BodyKind::Static, PosePrior{Pose::identity(), PoseNoise::isotropic(1e-4, 1e-4)}, false});
  sc.bodies.push_back(Body{"rig", BodyKind::Dynamic, std::nullopt, false});
  sc.bodies.push_back(Body{"block", BodyKind::Dynamic, std::nullopt, false});
  spec.staticTruth["lab"] = Pose::identity();

  CameraSpec cam;
  cam.name = "cam0";
  cam.rig = "rig";
  cam.intrinsics.fx = cam.intrinsics.fy = 500;
  cam.intrinsics.cx = 320;
  cam.intrinsics.cy = 240;
  cam.intrinsics.width = 640;
  cam.intrinsics.height = 480;
  const Pose rigCam(Rotation::exp(Vector3(0.02, -0.01, 0.03)), Vector3(0.03, 0.0, 0.05));
  cam.extrinsicPrior = PosePrior{rigCam, PoseNoise::isotropic(1e-3, 1e-3)};
  sc.cameras.push_back(cam);
  spec.cameraTruth["cam0"] = rigCam;

  // tags lie on the table (z = 0 plane), facing up: tag z points down
  const Rotation faceUp = Rotation::exp(Vector3(M_PI, 0, 0));
  auto addTag = [&](int id, double size, const std::string & body, const Vector3 & pos, double yawAngle,
                    bool prior) {
    const Pose p(faceUp * yaw(yawAngle), pos);
    TagSpec t{id, size, body, std::nullopt};
    if (prior) {
      t.prior = PosePrior{p, PoseNoise::isotropic(1e-3, 1e-3)};
    }
    sc.tags[id] = t;
    spec.tagTruth[id] = p;
  };
  addTag(2, 0.16, "lab", Vector3(-0.25, 0.18, 0), 0.1, true);
  addTag(3, 0.16, "lab", Vector3(0.28, 0.2, 0), -0.2, false);
  addTag(105, 0.1, "block", Vector3(0, 0, 0.06), 0.0, true);
  addTag(106, 0.08, "block", Vector3(0.1, 0.02, 0.06), 0.3, false);
  addTag(107, 0.08, "block", Vector3(-0.1, -0.02, 0.06), -0.4, false);

  auto & rig = spec.trajectories["rig"];
  auto & block = spec.trajectories["block"];
  for (int i = 0; i < nFrames; i++) {
    const double a = 2 * M_PI * i / std::max(nFrames, 2);
    const Vector3 eye(0.08 * std::cos(a), -0.45 + 0.05 * std::sin(a), 0.75);
    const Pose worldCam(lookAt(eye, Vector3(0, 0, 0)), eye);
    rig.push_back(worldCam * rigCam.inverse());
    block.emplace_back(yaw(0.3 * std::sin(a)), Vector3(0.08 * std::sin(a), -0.1 + 0.05 * std::cos(a), 0));
    spec.stamps.push_back(0.05 * i);
  }
  OdometryModel m;
  m.noiseSigma << 5e-4, 5e-4, 5e-4, 1e-3, 1e-3, 1e-3;
  m.reported = PoseNoise::isotropic(1e-3, 2e-3);
  if (cornerNoise == 0) {
    m.noiseSigma.setZero();
  }
  spec.odometry["rig"] = m;
  spec.validate();
  return (spec);
}

SimSpec loadSimSpec(const std::string & yaml)
{
  const YAML::Node doc = yaml_util::parseDocument(yaml);
  using yaml_util::get;
  using yaml_util::getOr;
  const auto scenario = get<std::string>(doc, "scenario", "");
  const auto seed = getOr<uint64_t>(doc, "seed", 0, "");
  const auto nFrames = getOr<int>(doc, "n_frames", 400, "");
  const double noise = getOr<double>(doc, "corner_noise", 1.0, "");
  SimSpec spec;
  if (scenario == "loop") {
    LoopOptions o;
    o.cornerNoise = noise;
    o.yawBias = getOr<double>(doc, "yaw_bias", o.yawBias, "");
    o.wallDistance = getOr<double>(doc, "wall_distance", o.wallDistance, "");
    o.tagSize = getOr<double>(doc, "tag_size", o.tagSize, "");
    o.priorEvery = getOr<int>(doc, "prior_every", o.priorEvery, "");
    o.focalLength = getOr<double>(doc, "focal_length", o.focalLength, "");
    o.odomRotationNoise = getOr<double>(doc, "odom_rotation_noise", o.odomRotationNoise, "");
    o.odomTranslationNoise =
      getOr<double>(doc, "odom_translation_noise", o.odomTranslationNoise, "");
    spec = makeLoopScenario(
      getOr<double>(doc, "size_m", 40.0, ""), getOr<int>(doc, "n_tags", 12, ""), nFrames, seed, o);
  } else if (scenario == "rig_block") {
    spec = makeRigBlockScenario(nFrames, seed, noise);
  } else {
    throw ValidationError(".scenario: expected loop or rig_block");
  }
  spec.minPixelArea = getOr<double>(doc, "min_pixel_area", spec.minPixelArea, "");
  spec.validate();
  return (spec);
}
}  // namespace fidslam
