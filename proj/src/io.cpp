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
#include <cstdio>
#include <fidslam/errors.hpp>
#include <fidslam/io.hpp>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "yaml_util.hpp"

namespace fidslam
{
using json = nlohmann::json;

namespace
{
// first non-empty line must be the versioned header
json readHeader(std::istream & in, const std::string & format, int * lineNo)
{
  std::string line;
  while (std::getline(in, line)) {
    (*lineNo)++;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json h;
    try {
      h = json::parse(line);
    } catch (const json::exception & e) {
      throw ParseError("line " + std::to_string(*lineNo) + ": " + e.what());
    }
    if (!h.is_object() || h.value("format", "") != format) {
      throw ValidationError(
        "line " + std::to_string(*lineNo) + ": expected header with format " + format);
    }
    if (h.value("version", 0) != 1) {
      throw ValidationError("line " + std::to_string(*lineNo) + ": unsupported version");
    }
    return (h);
  }
  throw ValidationError("missing " + format + " header");
}

template <typename F>
void forEachRecord(std::istream & in, int lineNo, F && f)
{
  std::string line;
  while (std::getline(in, line)) {
    lineNo++;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception & e) {
      throw ParseError("line " + std::to_string(lineNo) + ": " + e.what());
    }
    try {
      f(j);
    } catch (const json::exception & e) {
      throw ValidationError("line " + std::to_string(lineNo) + ": " + e.what());
    } catch (const ValidationError & e) {
      throw ValidationError("line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
}

std::vector<double> numbers(const json & j, size_t n, const char * what)
{
  const auto v = j.at(what).get<std::vector<double>>();
  if (v.size() != n) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(n) + " values");
  }
  return (v);
}

Pose poseFromJson(const json & j)
{
  const auto p = numbers(j, 3, "position");
  const auto q = numbers(j, 4, "orientation");
  const Eigen::Quaterniond quat(q[3], q[0], q[1], q[2]);
  if (!(quat.norm() > 1e-6)) {
    throw ValidationError("orientation: zero quaternion");
  }
  return (Pose(Rotation::fromQuaternion(quat), Vector3(p[0], p[1], p[2])));
}

std::string stampString(double t)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", t);
  return (buf);
}

FactorKind factorKindFromString(const std::string & s)
{
  for (const auto k : {FactorKind::AbsolutePrior, FactorKind::RelativePrior, FactorKind::Projection}) {
    if (toString(k) == s) {
      return (k);
    }
  }
  throw ValidationError("unknown factor kind " + s);
}

Verdict verdictFromString(const std::string & s)
{
  for (const auto v : {Verdict::Accepted, Verdict::Rejected, Verdict::Deferred}) {
    if (toString(v) == s) {
      return (v);
    }
  }
  throw ValidationError("unknown verdict " + s);
}
}  // namespace

// ----------------------------- detections ------------------------------

std::vector<DetectionFrame> readDetections(std::istream & in)
{
  int lineNo = 0;
  readHeader(in, "fidslam-detections", &lineNo);
  std::vector<DetectionFrame> frames;
  forEachRecord(in, lineNo, [&frames](const json & j) {
    DetectionFrame f;
    f.stamp = j.at("t").get<double>();
    for (const auto & c : j.at("cameras")) {
      CameraDetections cd;
      cd.camera = c.at("camera").get<std::string>();
      for (const auto & t : c.at("tags")) {
        TagDetection d;
        d.id = t.at("id").get<int>();
        const auto & corners = t.at("corners");
        if (!corners.is_array() || corners.size() != 4) {
          throw ValidationError("tag " + std::to_string(d.id) + ": expected 4 corners");
        }
        for (int i = 0; i < 4; i++) {
          const auto uv = corners[i].get<std::vector<double>>();
          if (uv.size() != 2) {
            throw ValidationError("tag " + std::to_string(d.id) + ": corner needs 2 values");
          }
          d.corners[i] = Vector2(uv[0], uv[1]);
        }
        cd.tags.push_back(d);
      }
      f.cameras.push_back(std::move(cd));
    }
    frames.push_back(std::move(f));
  });
  return (frames);
}

void writeDetections(std::ostream & out, const std::vector<DetectionFrame> & frames)
{
  out << json{{"format", "fidslam-detections"}, {"version", 1}}.dump() << "\n";
  for (const auto & f : frames) {
    json cams = json::array();
    for (const auto & cd : f.cameras) {
      json tags = json::array();
      for (const auto & d : cd.tags) {
        json corners = json::array();
        for (const auto & c : d.corners) {
          corners.push_back({c.x(), c.y()});
        }
        tags.push_back({{"id", d.id}, {"corners", corners}});
      }
      cams.push_back({{"camera", cd.camera}, {"tags", tags}});
    }
    out << json{{"t", f.stamp}, {"cameras", cams}}.dump() << "\n";
  }
}

// ------------------------------ odometry -------------------------------

std::vector<OdometrySample> readOdometry(std::istream & in)
{
  int lineNo = 0;
  readHeader(in, "fidslam-odometry", &lineNo);
  std::vector<OdometrySample> samples;
  forEachRecord(in, lineNo, [&samples](const json & j) {
    OdometrySample s;
    s.stamp = j.at("t").get<double>();
    s.body = j.at("body").get<std::string>();
    s.delta = poseFromJson(j);
    const auto n = numbers(j, 6, "noise");
    for (int i = 0; i < 6; i++) {
      s.noise.sigma(i) = n[i];
    }
    if (!s.noise.valid()) {
      throw ValidationError("noise: standard deviations must be positive");
    }
    samples.push_back(std::move(s));
  });
  return (samples);
}

void writeOdometry(std::ostream & out, const std::vector<OdometrySample> & samples)
{
  out << json{{"format", "fidslam-odometry"}, {"version", 1}}.dump() << "\n";
  for (const auto & s : samples) {
    const auto & t = s.delta.translation();
    const auto & q = s.delta.rotation().quaternion();
    const auto & n = s.noise.sigma;
    out << json{{"t", s.stamp},
                {"body", s.body},
                {"position", {t.x(), t.y(), t.z()}},
                {"orientation", {q.x(), q.y(), q.z(), q.w()}},
                {"noise", {n(0), n(1), n(2), n(3), n(4), n(5)}}}
             .dump()
        << "\n";
  }
}

// ----------------------------- trajectory ------------------------------

std::string formatValue(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", x);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') {
      s.pop_back();
    }
    if (s.back() == '.') {
      s.pop_back();
    }
  }
  if (s == "-0") {
    s = "0";
  }
  return (s);
}

void writeTrajectory(std::ostream & out, const Trajectory & traj)
{
  for (const auto & [t, p] : traj) {
    const auto & x = p.translation();
    const auto & q = p.rotation().quaternion();
    out << stampString(t);
    for (const double v : {x.x(), x.y(), x.z(), q.x(), q.y(), q.z(), q.w()}) {
      out << " " << formatValue(v);
    }
    out << "\n";
  }
}

Trajectory readTrajectory(std::istream & in)
{
  Trajectory traj;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    lineNo++;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
      continue;
    }
    std::istringstream ss(line);
    double v[8];
    for (double & x : v) {
      if (!(ss >> x)) {
        throw ParseError("line " + std::to_string(lineNo) + ": expected 8 numbers");
      }
    }
    const Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    traj.emplace_back(v[0], Pose(Rotation::fromQuaternion(q), Vector3(v[1], v[2], v[3])));
  }
  return (traj);
}

// ------------------------------- tag map -------------------------------

void writeTagMap(std::ostream & out, const std::vector<TagMapEntry> & map)
{
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "format" << YAML::Value << "fidslam-tagmap";
  e << YAML::Key << "version" << YAML::Value << 1;
  e << YAML::Key << "tags" << YAML::Value << YAML::BeginSeq;
  for (const auto & t : map) {
    e << YAML::BeginMap;
    e << YAML::Key << "id" << YAML::Value << t.id;
    e << YAML::Key << "body" << YAML::Value << t.body;
    e << YAML::Key << "size" << YAML::Value << t.size;
    e << YAML::Key << "source" << YAML::Value << (t.fromPrior ? "prior" : "discovered");
    yaml_util::emitPose(e, t.pose);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq << YAML::EndMap;
  out << e.c_str() << "\n";
}

std::vector<TagMapEntry> readTagMap(const std::string & yaml)
{
  const YAML::Node doc = yaml_util::parseDocument(yaml);
  if (yaml_util::getOr<std::string>(doc, "format", "", "") != "fidslam-tagmap") {
    throw ValidationError("format: expected fidslam-tagmap");
  }
  if (yaml_util::getOr<int>(doc, "version", 0, "") != 1) {
    throw ValidationError("version: unsupported");
  }
  std::vector<TagMapEntry> map;
  const YAML::Node tags = doc["tags"];
  if (!tags) {
    return (map);
  }
  if (!tags.IsSequence()) {
    throw ValidationError("tags: expected a list");
  }
  for (size_t i = 0; i < tags.size(); i++) {
    const std::string path = "tags[" + std::to_string(i) + "]";
    TagMapEntry t;
    t.id = yaml_util::get<int>(tags[i], "id", path);
    t.body = yaml_util::get<std::string>(tags[i], "body", path);
    t.size = yaml_util::get<double>(tags[i], "size", path);
    const auto src = yaml_util::get<std::string>(tags[i], "source", path);
    if (src != "prior" && src != "discovered") {
      throw ValidationError(path + ".source: expected prior or discovered");
    }
    t.fromPrior = (src == "prior");
    t.pose = yaml_util::parsePose(tags[i], path);
    map.push_back(t);
  }
  return (map);
}

void applyTagMapAsPriors(Scene * scene, const std::vector<TagMapEntry> & map, const PoseNoise & n)
{
  for (const auto & t : map) {
    TagSpec & s = scene->tags[t.id];
    s.id = t.id;
    s.body = t.body;
    s.size = t.size;
    s.prior = PosePrior{t.pose, n};
  }
  validateScene(*scene);
}

// ----------------------------- diagnostics -----------------------------

static const char * kDiagHeader = "time,factor_kind,camera,tag,body,error,verdict,rotations";

void writeDiagnostics(std::ostream & out, const std::vector<DiagnosticsRecord> & records)
{
  out << kDiagHeader << "\n";
  for (const auto & r : records) {
    char err[64];
    if (std::isnan(r.error)) {
      std::snprintf(err, sizeof(err), "nan");
    } else {
      std::snprintf(err, sizeof(err), "%.6g", r.error);
    }
    out << stampString(r.stamp) << "," << toString(r.kind) << "," << r.camera << ","
        << (r.tag >= 0 ? std::to_string(r.tag) : std::string()) << "," << r.body << "," << err
        << "," << toString(r.verdict) << "," << r.rotations << "\n";
  }
}

std::vector<DiagnosticsRecord> readDiagnostics(std::istream & in)
{
  std::vector<DiagnosticsRecord> records;
  std::string line;
  if (!std::getline(in, line) || line != kDiagHeader) {
    throw ValidationError("diagnostics: missing header");
  }
  int lineNo = 1;
  while (std::getline(in, line)) {
    lineNo++;
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      f.push_back(cell);
    }
    if (line.back() == ',') {
      f.push_back("");
    }
    if (f.size() != 8) {
      throw ParseError("diagnostics line " + std::to_string(lineNo) + ": expected 8 columns");
    }
    try {
      DiagnosticsRecord r;
      r.stamp = std::stod(f[0]);
      r.kind = factorKindFromString(f[1]);
      r.camera = f[2];
      r.tag = f[3].empty() ? -1 : std::stoi(f[3]);
      r.body = f[4];
      r.error = std::stod(f[5]);
      r.verdict = verdictFromString(f[6]);
      r.rotations = std::stoi(f[7]);
      records.push_back(r);
    } catch (const std::logic_error &) {
      throw ParseError("diagnostics line " + std::to_string(lineNo) + ": bad number");
    }
  }
  return (records);
}

// -------------------------------- files --------------------------------

std::string readFile(const std::string & path)
{
  std::ifstream f(path);
  if (!f) {
    throw ValidationError("cannot open " + path);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return (ss.str());
}

void writeFile(const std::string & path, const std::string & content)
{
  std::ofstream f(path);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f << content;
  if (!f) {
    throw Error("failed writing " + path);
  }
}
}  // namespace fidslam
