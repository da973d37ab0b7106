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

#ifndef FIDSLAM__SIMULATOR_HPP_
#define FIDSLAM__SIMULATOR_HPP_

#include <fidslam/pipeline.hpp>
#include <fidslam/scene.hpp>
#include <map>
#include <string>
#include <vector>

namespace fidslam
{
struct OdometryModel
{
  Vector6 bias{Vector6::Zero()};        // per-step twist (rotation first) in the body frame
  Vector6 noiseSigma{Vector6::Zero()};  // injected per-step noise
  PoseNoise reported;                   // noise model written to the log
};

// Ground truth plus the scene the solver gets to see.
struct SimSpec
{
  Scene scene;
  std::map<std::string, Pose> staticTruth;                // world-from-body
  std::map<std::string, std::vector<Pose>> trajectories;  // world-from-body per frame
  std::map<int, Pose> tagTruth;                           // body-from-tag
  std::map<std::string, Pose> cameraTruth;                // rig-from-camera
  std::vector<double> stamps;
  std::map<std::string, OdometryModel> odometry;  // bodies that report odometry
  double cornerNoise{1.0};                        // pixels
  double minPixelArea{100.0};
  uint64_t seed{0};

  Pose bodyPose(const std::string & body, size_t frame) const;
  // throws ValidationError
  void validate() const;
};

std::vector<DetectionFrame> renderDetections(const SimSpec & spec);
std::vector<OdometrySample> renderOdometry(const SimSpec & spec, const std::string & body);
// all bodies with an odometry model, ordered by stamp, then body name
std::vector<OdometrySample> renderOdometry(const SimSpec & spec);
// integrates odometry deltas from the true first pose
Trajectory deadReckon(const SimSpec & spec, const std::vector<OdometrySample> & odom,
                      const std::string & body);
Trajectory groundTruth(const SimSpec & spec, const std::string & body);

struct LoopOptions
{
  double wallDistance{3.0};  // from the path to the tag wall
  double tagSize{1.2};
  double cornerRadius{0.5};
  double focalLength{200.0};  // pixels, 640x480 image
  int priorEvery{3};  // every n-th tag carries a prior (12 tags -> 4 priors)
  double yawBias{1e-3};
  double cornerNoise{1.0};
  double odomRotationNoise{2e-4};
  double odomTranslationNoise{1e-3};
  // noise model written to the odometry log, 0: derived from noise and bias
  double odomReportedRotation{0};
  double odomReportedTranslation{0};
};

// A single camera rig driving counter-clockwise around a rounded square
// of the given perimeter, looking at tags on the outer walls.
SimSpec makeLoopScenario(
  double sizeM, int nTags, int nFrames, uint64_t seed, const LoopOptions & o = LoopOptions());

// Static "lab" with tag 2, a dynamic camera "rig" and a dynamic "block"
// carrying tag 105 (with prior) and further discovered tags.
SimSpec makeRigBlockScenario(int nFrames, uint64_t seed, double cornerNoise = 1.0);

// YAML: {scenario: loop|rig_block, size_m, n_tags, n_frames, seed,
//        corner_noise, yaw_bias, wall_distance, tag_size, ...}
SimSpec loadSimSpec(const std::string & yaml);
}  // namespace fidslam
#endif  // FIDSLAM__SIMULATOR_HPP_
