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

#ifndef FIDSLAM__GRAPH_HPP_
#define FIDSLAM__GRAPH_HPP_

#include <fidslam/factor.hpp>
#include <map>
#include <optional>
#include <vector>

namespace fidslam
{
// Bipartite variable/factor graph. Variables are created implicitly by
// the factors referencing them and may exist without a value (the full
// graph holds measurements whose variables are not yet determined).
class Graph
{
public:
  using FactorMap = std::map<uint64_t, FactorPtr>;
  using VariableMap = std::map<VariableKey, std::optional<Pose>>;

  void addFactor(const FactorPtr & f);
  void removeFactor(uint64_t id);
  bool hasFactor(uint64_t id) const { return (factors_.count(id) != 0); }
  const FactorPtr & factor(uint64_t id) const;
  const FactorMap & factors() const { return (factors_); }
  size_t numFactors() const { return (factors_.size()); }

  // adds the variable if it does not exist yet
  void setValue(const VariableKey & k, const Pose & p);
  bool hasVariable(const VariableKey & k) const { return (variables_.count(k) != 0); }
  bool hasValue(const VariableKey & k) const;
  const Pose & value(const VariableKey & k) const;
  const Pose * valuePtr(const VariableKey & k) const;
  const VariableMap & variables() const { return (variables_); }
  const std::vector<uint64_t> & adjacentFactors(const VariableKey & k) const;

  // 1/2 |r|^2 of one factor; throws EvaluationFailure.
  double factorError(const Factor & f) const;
  double factorError(uint64_t id) const { return (factorError(*factor(id))); }
  // Sum over all factors, in factor-id order. Records each factor's
  // whitened residual norm. Throws EvaluationFailure naming the factor.
  double totalError();
  const std::map<uint64_t, double> & residualNorms() const { return (norms_); }

  // values of a factor's variables in slot order; throws if one is unset
  std::array<const Pose *, 4> slotValues(const Factor & f) const;

private:
  FactorMap factors_;
  VariableMap variables_;
  std::map<VariableKey, std::vector<uint64_t>> adjacency_;
  std::map<uint64_t, double> norms_;
};
}  // namespace fidslam
#endif  // FIDSLAM__GRAPH_HPP_
