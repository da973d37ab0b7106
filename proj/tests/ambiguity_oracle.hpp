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

#ifndef FIDSLAM__AMBIGUITY_ORACLE_HPP_
#define FIDSLAM__AMBIGUITY_ORACLE_HPP_

#include <fidslam/errors.hpp>
#include <fidslam/planar_pose.hpp>
#include <random>

#include "test_util.hpp"

namespace fidslam
{
namespace test
{
struct OracleStats
{
  int draws{0};
  int admitted{0};
  int agree{0};
  int flips{0};  // draws where the error-best candidate is the wrong one
  double pixelArea{0};
  double agreement() const { return (draws > 0 ? static_cast<double>(agree) / draws : 0.0); }
  double admitRate() const { return (draws > 0 ? static_cast<double>(admitted) / draws : 0.0); }
};

// Monte-Carlo oracle: with the true pose known, admitting the error-best
// candidate is correct iff it is the candidate closer (in rotation) to the
// truth, or the two candidates coincide. The gate decision agrees with the
// oracle when it admits exactly the draws for which admission is correct.
inline OracleStats runAmbiguityOracle(
  const Intrinsics & k, const Pose & truth, double tagSize, double pixelSigma, int seeds,
  AmbiguityRule rule, double ratioThreshold = 0.3, double maxAngle = 60.0)
{
  OracleStats s;
  const Corners clean = renderCorners(k, truth, tagSize);
  s.pixelArea = fidslam::pixelArea(clean);
  for (int seed = 0; seed < seeds; seed++) {
    std::mt19937_64 rng(static_cast<uint64_t>(seed));
    std::normal_distribution<double> n(0.0, pixelSigma);
    Corners c = clean;
    for (auto & p : c) {
      p += Vector2(n(rng), n(rng));
    }
    s.draws++;
    AmbiguousPose a;
    try {
      a = ambiguityCheck(c, k, tagSize);
    } catch (const Error &) {
      s.agree++;  // no pose at all: neither oracle nor gate admits
      continue;
    }
    const bool correct = !a.alternateValid ||
                         rotationError(a.best, truth) <= rotationError(a.alternate, truth);
    const bool admit = isUnambiguous(a, rule, ratioThreshold, maxAngle);
    s.flips += !correct;
    s.admitted += admit;
    s.agree += (admit == correct);
  }
  return (s);
}
}  // namespace test
}  // namespace fidslam
#endif  // FIDSLAM__AMBIGUITY_ORACLE_HPP_
