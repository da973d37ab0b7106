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

#ifndef FIDSLAM__PIPELINE_HPP_
#define FIDSLAM__PIPELINE_HPP_

#include <fidslam/initializer.hpp>
#include <fidslam/scene.hpp>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fidslam
{
struct TagDetection
{
  int id{0};
  Corners corners;  // s1..s4 order, pixels
};

struct CameraDetections
{
  std::string camera;
  std::vector<TagDetection> tags;
};

struct DetectionFrame
{
  double stamp{0};  // seconds
  std::vector<CameraDetections> cameras;
};

// body pose change from the previous frame to this one: T(t-1)^-1 T(t)
struct OdometrySample
{
  double stamp{0};
  std::string body;
  Pose delta;
  PoseNoise noise;
};

struct DiagnosticsRecord
{
  double stamp{0};
  FactorKind kind{FactorKind::Projection};
  std::string camera;
  int tag{-1};
  std::string body;
  double error{0};
  Verdict verdict{Verdict::Deferred};
  int rotations{0};
};

struct TagMapEntry
{
  int id{0};
  std::string body;
  double size{0};
  bool fromPrior{false};
  Pose pose;  // tag in body
};

using Trajectory = std::vector<std::pair<double, Pose>>;

struct PipelineOptions
{
  int window{0};  // 0: optimize everything after each frame
  std::optional<AmbiguityRule> ambiguityRule;  // overrides the scene setting
  OptimizerConfig optimizer;
};

// Drives the robust initializer frame by frame: builds factors from
// detections and odometry and keeps the per-factor diagnostics.
class Pipeline
{
public:
  explicit Pipeline(const Scene & scene, const PipelineOptions & options = PipelineOptions());
  // Throws OutOfOrderFrame, ValidationError (unknown camera, duplicate tag,
  // non-finite corners, odometry for a non-dynamic body).
  RoundReport ingestFrame(
    const DetectionFrame & frame, const std::vector<OdometrySample> & odometry = {});
  // frames paired with odometry samples of equal stamp (within 1 us)
  void run(const std::vector<DetectionFrame> & frames, const std::vector<OdometrySample> & odom);

  const Scene & scene() const { return (scene_); }
  const TwoGraphState & state() const { return (state_); }
  const std::vector<double> & stamps() const { return (stamps_); }
  int64_t numFrames() const { return (static_cast<int64_t>(stamps_.size())); }
  const std::vector<DiagnosticsRecord> & diagnostics() const { return (diagnostics_); }
  std::vector<std::string> dynamicBodies() const;

  // Throws UnknownBody (not a dynamic body of the scene) and NoPoses.
  Trajectory trajectory(const std::string & body) const;
  std::vector<TagMapEntry> tagMap() const;
  double totalError() const;
  DiagnosticsRecord describe(const Factor & f, double stamp) const;

private:
  VariableKey bodyKey(const std::string & body, int64_t frame) const;
  std::string tagBody(int id) const;

  Scene scene_;
  TwoGraphState state_;
  std::vector<double> stamps_;
  std::vector<DiagnosticsRecord> diagnostics_;
  std::map<int, TagSpec> discoveredTags_;  // default-body tags seen so far
};
}  // namespace fidslam
#endif  // FIDSLAM__PIPELINE_HPP_
