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
#include <fidslam/graph.hpp>

namespace fidslam
{
void Graph::addFactor(const FactorPtr & f)
{
  if (!factors_.emplace(f->id, f).second) {
    throw Error("duplicate factor id " + std::to_string(f->id));
  }
  const auto keys = f->keys();
  for (size_t i = 0; i < keys.size(); i++) {
    const auto & k = keys[i];
    if (std::find(keys.begin(), keys.begin() + i, k) != keys.begin() + i) {
      continue;  // repeated slot (camera on its own rig body)
    }
    variables_.try_emplace(k);
    adjacency_[k].push_back(f->id);
  }
}

void Graph::removeFactor(uint64_t id)
{
  const auto it = factors_.find(id);
  if (it == factors_.end()) {
    return;
  }
  for (const auto & k : it->second->keys()) {
    auto & adj = adjacency_[k];
    adj.erase(std::remove(adj.begin(), adj.end(), id), adj.end());
  }
  factors_.erase(it);
  norms_.erase(id);
}

const FactorPtr & Graph::factor(uint64_t id) const
{
  const auto it = factors_.find(id);
  if (it == factors_.end()) {
    throw Error("no factor with id " + std::to_string(id));
  }
  return (it->second);
}

void Graph::setValue(const VariableKey & k, const Pose & p) { variables_[k] = p; }

bool Graph::hasValue(const VariableKey & k) const
{
  const auto it = variables_.find(k);
  return (it != variables_.end() && it->second.has_value());
}

const Pose * Graph::valuePtr(const VariableKey & k) const
{
  const auto it = variables_.find(k);
  return ((it != variables_.end() && it->second) ? &(*it->second) : nullptr);
}

const Pose & Graph::value(const VariableKey & k) const
{
  const Pose * p = valuePtr(k);
  if (!p) {
    throw Error("variable has no value: " + k.str());
  }
  return (*p);
}

const std::vector<uint64_t> & Graph::adjacentFactors(const VariableKey & k) const
{
  static const std::vector<uint64_t> empty;
  const auto it = adjacency_.find(k);
  return (it == adjacency_.end() ? empty : it->second);
}

std::array<const Pose *, 4> Graph::slotValues(const Factor & f) const
{
  std::array<const Pose *, 4> v{nullptr, nullptr, nullptr, nullptr};
  const auto keys = f.keys();
  for (size_t i = 0; i < keys.size(); i++) {
    v[i] = valuePtr(keys[i]);
    if (!v[i]) {
      throw EvaluationFailure(
        f.id, "factor " + std::to_string(f.id) + " references unset variable " + keys[i].str());
    }
  }
  return (v);
}

double Graph::factorError(const Factor & f) const
{
  Linearization lin;
  try {
    linearize(f, slotValues(f), &lin, false);
  } catch (const PointBehindCamera & e) {
    throw EvaluationFailure(f.id, "factor " + std::to_string(f.id) + ": " + e.what());
  }
  return (0.5 * lin.r.head(lin.dim).squaredNorm());
}

double Graph::totalError()
{
  double sum = 0;
  for (const auto & [id, f] : factors_) {
    const double e = factorError(*f);
    norms_[id] = std::sqrt(2.0 * e);
    sum += e;
  }
  return (sum);
}
}  // namespace fidslam
