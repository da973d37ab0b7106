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

#ifndef FIDSLAM__IO_HPP_
#define FIDSLAM__IO_HPP_

#include <fidslam/pipeline.hpp>
#include <iosfwd>
#include <string>
#include <vector>

namespace fidslam
{
// All readers throw ParseError for malformed content and ValidationError
// for well-formed but invalid content (wrong format tag or version,
// missing fields). Quaternions are written scalar-last (x y z w).

// Line-delimited JSON. First line: {"format":"fidslam-detections","version":1},
// then one frame per line:
// {"t":0.1,"cameras":[{"camera":"cam0","tags":[{"id":3,"corners":[[u,v],...]}]}]}
std::vector<DetectionFrame> readDetections(std::istream & in);
void writeDetections(std::ostream & out, const std::vector<DetectionFrame> & frames);

// Line-delimited JSON. First line: {"format":"fidslam-odometry","version":1},
// then {"t":0.1,"body":"rig","position":[x,y,z],"orientation":[x,y,z,w],
//       "noise":[rx,ry,rz,tx,ty,tz]}
std::vector<OdometrySample> readOdometry(std::istream & in);
void writeOdometry(std::ostream & out, const std::vector<OdometrySample> & samples);

// One line per pose: "stamp tx ty tz qx qy qz qw"; stamp with 9 decimals,
// the other values with at most 9 decimals, trailing zeros removed.
void writeTrajectory(std::ostream & out, const Trajectory & traj);
Trajectory readTrajectory(std::istream & in);
std::string formatValue(double x);

// YAML document {format: fidslam-tagmap, version: 1, tags: [...]}
void writeTagMap(std::ostream & out, const std::vector<TagMapEntry> & map);
std::vector<TagMapEntry> readTagMap(const std::string & yaml);
// sets (or replaces) the prior of every mapped tag; unknown tags are added
void applyTagMapAsPriors(Scene * scene, const std::vector<TagMapEntry> & map, const PoseNoise & n);

// CSV with header "time,factor_kind,camera,tag,body,error,verdict,rotations"
void writeDiagnostics(std::ostream & out, const std::vector<DiagnosticsRecord> & records);
std::vector<DiagnosticsRecord> readDiagnostics(std::istream & in);

std::string readFile(const std::string & path);  // throws ValidationError
void writeFile(const std::string & path, const std::string & content);
}  // namespace fidslam
#endif  // FIDSLAM__IO_HPP_
