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

#ifndef FIDSLAM__INITIALIZER_HPP_
#define FIDSLAM__INITIALIZER_HPP_

#include <fidslam/graph.hpp>
#include <fidslam/optimizer.hpp>
#include <fidslam/planar_pose.hpp>
#include <fidslam/scene.hpp>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace fidslam
{
struct InitializerConfig
{
  AmbiguityRule ambiguityRule{AmbiguityRule::Decisive};
  double ambiguityRatioThreshold{0.3};
  double maxAmbiguousViewAngle{60.0};  // degrees
  // a subgraph is accepted if the mean over its factors of |r|^2 / dim
  // (whitened) does not exceed this value
  double subgraphErrorThreshold{4.0};
  // stiffness of the temporary priors holding old dynamic poses in place
  double pinRotationSigma{1e-3};
  double pinTranslationSigma{1e-3};
  // number of most recent frames optimized after each round, 0 = all
  int window{0};
  OptimizerConfig optimizer;
  static InitializerConfig fromScene(const Scene & scene);
};

enum class Verdict { Accepted, Rejected, Deferred };
std::string toString(Verdict v);

// A connected set of factors whose variables can be determined, given the
// variables already in the optimized graph.
struct Subgraph
{
  std::vector<FactorPtr> initList;  // measurement factors in discovery order
  std::vector<FactorPtr> context;   // pins and priors of already determined variables
  std::vector<VariableKey> newVariables;
  std::vector<VariableKey> pinned;
  bool empty() const { return (initList.empty()); }
};

struct FactorRecord
{
  uint64_t factorId{0};
  Verdict verdict{Verdict::Deferred};
  double error{0};  // whitened residual norm, NaN if not evaluated
  int rotations{0};
};

struct SubgraphReport
{
  std::vector<uint64_t> factors;
  std::vector<VariableKey> newVariables;
  bool accepted{false};
  int rotations{0};          // rotations of the init list tried (accepted: the one used)
  double errorPerFactor{0};  // of the accepted or best attempt, +inf if none evaluable
};

struct RoundReport
{
  int64_t frame{0};
  std::vector<SubgraphReport> subgraphs;
  std::vector<FactorRecord> records;
  std::optional<OptimizerResult> optimization;  // of the optimized graph
};

// The full graph holds every measurement ever received; the optimized
// graph only holds factors of validated subgraphs. A variable counts as
// determined iff it has a value in the optimized graph.
class TwoGraphState
{
public:
  explicit TwoGraphState(const InitializerConfig & cfg = InitializerConfig());
  const InitializerConfig & config() const { return (config_); }
  InitializerConfig & config() { return (config_); }
  const Graph & full() const { return (full_); }
  const Graph & optimized() const { return (optimized_); }
  Graph & optimized() { return (optimized_); }
  bool isDetermined(const VariableKey & k) const { return (optimized_.hasValue(k)); }
  std::set<VariableKey> determined() const;
  // frame in which a variable was first determined, -1 if never
  int64_t determinedAt(const VariableKey & k) const;
  // projection factors of rejected subgraphs are not discovered again
  bool isRetired(uint64_t id) const { return (retired_.count(id) != 0); }
  // factors belonging to neither graph yet
  bool isAbsorbed(uint64_t id) const { return (optimized_.hasFactor(id)); }
  FactorPtr makeFactor(
    std::variant<AbsolutePosePrior, RelativePosePrior, TagProjection> data, bool pin = false);
  // cached ambiguity analysis of a projection factor, empty if no pose exists
  const std::optional<AmbiguousPose> & ambiguity(const Factor & f) const;
  bool passesGate(const Factor & f) const;

  // used by the initializer implementation
  void addToFull(const FactorPtr & f) { full_.addFactor(f); }
  void retire(uint64_t id) { retired_.insert(id); }
  void markDetermined(const VariableKey & k, int64_t frame) { determinedAt_.emplace(k, frame); }

  // Windowed mode: dynamic poses that left the window are frozen and
  // their factors are summarized by linearized priors.
  bool isMarginalized(const VariableKey & k) const { return (marginalized_.count(k) != 0); }
  const std::set<VariableKey> & marginalized() const { return (marginalized_); }
  const SubProblem & window() const { return (window_); }
  // marginalizes the given determined variables out of the optimized graph
  void marginalize(const std::set<VariableKey> & vars);

private:
  InitializerConfig config_;
  Graph full_;
  Graph optimized_;
  std::set<uint64_t> retired_;
  std::map<VariableKey, int64_t> determinedAt_;
  uint64_t nextId_{1};
  std::set<VariableKey> marginalized_;
  SubProblem window_;  // free variables are filled in per optimization
  mutable std::map<uint64_t, std::optional<AmbiguousPose>> ambiguity_;
};

// Relative priors first, then tag projections by descending pixel area
// (across all cameras), then everything else. Ties are broken by frame,
// camera name and tag id; remaining ties keep their input order.
std::vector<FactorPtr> orderNewFactors(std::vector<FactorPtr> factors);
bool factorOrderLess(const Factor & a, const Factor & b);

// Breadth-first traversal of the full graph starting at `seed`. Factors in
// `claimed` and factors touching `claimedVars` belong to other subgraphs of
// the same round and are skipped.
Subgraph discoverSubgraph(
  const TwoGraphState & state, const FactorPtr & seed, const std::set<uint64_t> & claimed = {},
  const std::set<VariableKey> & claimedVars = {});

// Assigns initial values to the subgraph variables in `g`, walking the
// factors in the given order. Throws InitializationImpossible.
void initializeSubgraph(
  const TwoGraphState & state, const Subgraph & sg, const std::vector<FactorPtr> & order,
  Graph * g);

// Optimizes the subgraph for each rotation of its init list until the
// error per factor falls below the threshold; on success the new variables
// and factors move into the optimized graph (which is not re-optimized
// here).
bool validateAndTransfer(
  TwoGraphState & state, const Subgraph & sg, int64_t frame, SubgraphReport * report,
  std::map<uint64_t, double> * factorErrors);

// Enters the factors into the full graph, discovers, validates and
// transfers subgraphs, and re-optimizes the optimized graph.
RoundReport processNewFactors(
  TwoGraphState & state, const std::vector<FactorPtr> & newFactors, int64_t frame);
}  // namespace fidslam
#endif  // FIDSLAM__INITIALIZER_HPP_
