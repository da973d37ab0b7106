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

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fidslam/errors.hpp>
#include <fidslam/io.hpp>
#include <fidslam/pipeline.hpp>
#include <fidslam/simulator.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

namespace fs = std::filesystem;
using namespace fidslam;

namespace
{
constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;

std::vector<DetectionFrame> loadDetections(const std::string & path)
{
  std::istringstream in(readFile(path));
  return (readDetections(in));
}

std::vector<OdometrySample> loadOdometry(const std::string & path)
{
  std::istringstream in(readFile(path));
  return (readOdometry(in));
}

template <typename F>
std::string render(F && f)
{
  std::ostringstream ss;
  f(ss);
  return (ss.str());
}

int solve(
  const std::string & scenePath, const std::string & detPath, const std::string & odomPath,
  int window, const std::string & outDir, const std::string & rule)
{
  const Scene scene = loadSceneFile(scenePath);
  for (const auto & w : validateSolvability(scene)) {
    std::cerr << "warning: " << w << std::endl;
  }
  PipelineOptions opt;
  opt.window = window;
  if (!rule.empty()) {
    opt.ambiguityRule = ambiguityRuleFromString(rule);
  }
  const auto frames = loadDetections(detPath);
  const auto odom = odomPath.empty() ? std::vector<OdometrySample>() : loadOdometry(odomPath);
  Pipeline p(scene, opt);
  p.run(frames, odom);
  fs::create_directories(outDir);
  for (const auto & body : p.dynamicBodies()) {
    try {
      const Trajectory t = p.trajectory(body);
      writeFile(
        (fs::path(outDir) / ("trajectory_" + body + ".txt")).string(),
        render([&t](std::ostream & o) { writeTrajectory(o, t); }));
    } catch (const NoPoses & e) {
      std::cerr << "warning: " << e.what() << std::endl;
    }
  }
  const auto map = p.tagMap();
  writeFile(
    (fs::path(outDir) / "tag_map.yaml").string(),
    render([&map](std::ostream & o) { writeTagMap(o, map); }));
  writeFile(
    (fs::path(outDir) / "diagnostics.csv").string(),
    render([&p](std::ostream & o) { writeDiagnostics(o, p.diagnostics()); }));
  std::cout << "frames: " << p.numFrames() << ", factors: " << p.state().optimized().numFactors()
            << " optimized / " << p.state().full().numFactors() << " total, error: "
            << p.totalError() << std::endl;
  return (0);
}

int simulate(const std::string & specPath, const std::string & outDir)
{
  const SimSpec spec = loadSimSpec(readFile(specPath));
  fs::create_directories(outDir);
  const fs::path d(outDir);
  writeFile((d / "scene.yaml").string(), serializeScene(spec.scene) + "\n");
  const auto det = renderDetections(spec);
  writeFile(
    (d / "detections.jsonl").string(),
    render([&det](std::ostream & o) { writeDetections(o, det); }));
  const auto odom = renderOdometry(spec);
  writeFile(
    (d / "odometry.jsonl").string(),
    render([&odom](std::ostream & o) { writeOdometry(o, odom); }));
  for (const auto & [body, traj] : spec.trajectories) {
    const Trajectory t = groundTruth(spec, body);
    writeFile(
      (d / ("truth_" + body + ".txt")).string(),
      render([&t](std::ostream & o) { writeTrajectory(o, t); }));
  }
  std::vector<TagMapEntry> truth;
  for (const auto & [id, pose] : spec.tagTruth) {
    const TagSpec & t = spec.scene.tags.at(id);
    truth.push_back(TagMapEntry{id, t.body, t.size, t.prior.has_value(), pose});
  }
  writeFile(
    (d / "truth_tags.yaml").string(),
    render([&truth](std::ostream & o) { writeTagMap(o, truth); }));
  std::cout << "frames: " << det.size() << ", odometry samples: " << odom.size() << std::endl;
  return (0);
}

int diag(const std::string & runDir, int top)
{
  std::istringstream in(readFile((fs::path(runDir) / "diagnostics.csv").string()));
  const auto recs = readDiagnostics(in);
  std::map<Verdict, int> counts;
  for (const auto & r : recs) {
    counts[r.verdict]++;
  }
  std::printf(
    "%zu records: %d accepted, %d rejected, %d deferred\n", recs.size(),
    counts[Verdict::Accepted], counts[Verdict::Rejected], counts[Verdict::Deferred]);
  // rejected factors grouped by what they refer to
  using Key = std::tuple<std::string, std::string, int, std::string>;
  std::map<Key, std::pair<int, double>> rejected;
  for (const auto & r : recs) {
    if (r.verdict != Verdict::Rejected) {
      continue;
    }
    auto & e = rejected[Key{toString(r.kind), r.camera, r.tag, r.body}];
    e.first++;
    if (std::isfinite(r.error)) {
      e.second = std::max(e.second, r.error);
    }
  }
  if (!rejected.empty()) {
    std::printf("\nrejected factors (kind camera tag body: count, max error):\n");
    std::vector<std::pair<Key, std::pair<int, double>>> v(rejected.begin(), rejected.end());
    std::stable_sort(v.begin(), v.end(), [](const auto & a, const auto & b) {
      return (a.second.second > b.second.second);
    });
    for (const auto & [k, e] : v) {
      std::printf(
        "  %-15s %-8s %5s %-10s: %5d  %10.3f\n", std::get<0>(k).c_str(), std::get<1>(k).c_str(),
        std::get<2>(k) >= 0 ? std::to_string(std::get<2>(k)).c_str() : "-",
        std::get<3>(k).c_str(), e.first, e.second);
    }
  }
  std::vector<DiagnosticsRecord> acc;
  for (const auto & r : recs) {
    if (r.verdict == Verdict::Accepted && std::isfinite(r.error)) {
      acc.push_back(r);
    }
  }
  std::stable_sort(acc.begin(), acc.end(), [](const auto & a, const auto & b) {
    return (a.error > b.error);
  });
  if (!acc.empty()) {
    std::printf("\nlargest accepted errors:\n");
    for (int i = 0; i < std::min<int>(top, acc.size()); i++) {
      const auto & r = acc[i];
      std::printf(
        "  t=%.3f %-15s %-8s %5s %-10s %10.3f\n", r.stamp, toString(r.kind).c_str(),
        r.camera.c_str(), r.tag >= 0 ? std::to_string(r.tag).c_str() : "-", r.body.c_str(),
        r.error);
    }
  }
  return (0);
}
}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"fidslam: fiducial marker factor-graph SLAM"};
  app.require_subcommand(1);

  std::string scene, detections, odometry, outDir = ".", rule;
  int window = 0;
  auto * s = app.add_subcommand("solve", "solve a detection log");
  s->add_option("--scene", scene, "scene YAML")->required();
  s->add_option("--detections", detections, "detections JSONL")->required();
  s->add_option("--odometry", odometry, "odometry JSONL");
  s->add_option("--window", window, "optimize only the last N frames (0: all)")
    ->check(CLI::NonNegativeNumber);
  s->add_option("--out-dir", outDir, "output directory");
  s->add_option("--ambiguity-rule", rule, "decisive or literal")
    ->check(CLI::IsMember({"decisive", "literal"}));

  std::string spec, simOut = ".";
  auto * m = app.add_subcommand("simulate", "render a synthetic scenario");
  m->add_option("--spec", spec, "simulation spec YAML")->required();
  m->add_option("--out-dir", simOut, "output directory");

  std::string runDir;
  int top = 10;
  auto * d = app.add_subcommand("diag", "summarize the diagnostics of a run");
  d->add_option("--run", runDir, "output directory of a solve run")->required();
  d->add_option("--top", top, "number of largest errors to list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return (rc == 0 ? 0 : kExitValidation);
  }
  try {
    if (s->parsed()) {
      return (solve(scene, detections, odometry, window, outDir, rule));
    }
    if (m->parsed()) {
      return (simulate(spec, simOut));
    }
    return (diag(runDir, top));
  } catch (const ParseError & e) {
    std::cerr << "error: " << e.what() << std::endl;
    return (kExitValidation);
  } catch (const ValidationError & e) {
    std::cerr << "error: " << e.what() << std::endl;
    return (kExitValidation);
  } catch (const OutOfOrderFrame & e) {
    std::cerr << "error: " << e.what() << std::endl;
    return (kExitValidation);
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << std::endl;
    return (kExitPipeline);
  }
}
