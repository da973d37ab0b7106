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

#ifndef FIDSLAM__OPTIMIZER_HPP_
#define FIDSLAM__OPTIMIZER_HPP_

#include <Eigen/Sparse>
#include <fidslam/graph.hpp>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace fidslam
{
struct OptimizerConfig
{
  int maxIterations{100};
  double initialLambda{1e-4};
  double lambdaUp{10.0};
  double lambdaDown{10.0};
  double relativeTolerance{1e-9};
  double absoluteTolerance{1e-12};
  double maxLambda{1e10};
  // throws ValidationError
  void validate() const;
};

enum class OptimizerStatus { Converged, MaxIterations, Stalled };

std::string toString(OptimizerStatus s);

struct OptimizerResult
{
  double initialError{0};
  double finalError{0};
  int iterations{0};
  OptimizerStatus status{OptimizerStatus::Converged};
  std::vector<double> errorHistory;  // error after each accepted step
};

// Gauss-Newton system J^T J delta = -J^T r in 6x6 blocks, variables
// ordered by VariableKey.
class LinearSystem
{
public:
  explicit LinearSystem(std::vector<VariableKey> vars);

  // adds the contribution of one linearized factor; slot keys not in the
  // system (frozen variables) are skipped
  void add(const std::vector<VariableKey> & slotKeys, const Linearization & lin);
  // same for a dense residual r with Jacobian J (r.size() x 6 * keys.size())
  void add(
    const std::vector<VariableKey> & keys, const Eigen::MatrixXd & J, const Eigen::VectorXd & r);

  int numVariables() const { return (static_cast<int>(keys_.size())); }
  const std::vector<VariableKey> & keys() const { return (keys_); }
  int index(const VariableKey & k) const;
  size_t numBlocks() const { return (blocks_.size()); }
  bool hasBlock(int i, int j) const;

  Eigen::MatrixXd denseHessian() const;
  Eigen::SparseMatrix<double> sparseHessian() const;
  const Eigen::VectorXd & gradient() const { return (b_); }

  // Solves (H + lambda diag(H)) delta = -g. Dense below denseLimit
  // variables, sparse LDLT otherwise. Throws SingularSystem.
  Eigen::VectorXd solve(double lambda, int denseLimit = 50) const;
  // throws SingularSystem when the undamped system is rank deficient
  void checkRank(int denseLimit = 50) const;

private:
  std::vector<VariableKey> keys_;
  std::map<VariableKey, int> index_;
  std::map<std::pair<int, int>, Matrix6> blocks_;  // upper triangle, i <= j
  Eigen::VectorXd b_;
};

// Dense Gaussian factor 1/2 |R (x (-) x0) + r0|^2 over several variables,
// where x (-) x0 stacks ominus(x_i, x0_i). It summarizes the information
// of factors whose variables have been marginalized.
struct LinearizedPrior
{
  std::vector<VariableKey> keys;
  std::vector<Pose> origin;
  Eigen::MatrixXd R;
  Eigen::VectorXd r0;

  Eigen::VectorXd residual(const Graph & g) const;
  Eigen::MatrixXd jacobian(const Graph & g) const;
  double error(const Graph & g) const { return (0.5 * residual(g).squaredNorm()); }
  bool involves(const VariableKey & k) const;
};

// Restriction of the graph to a set of free variables: only non-excluded
// factors adjacent to them are evaluated, plus the linearized priors.
// Variables outside freeVars stay constant.
struct SubProblem
{
  std::vector<VariableKey> freeVars;
  std::set<uint64_t> excludedFactors;
  std::vector<LinearizedPrior> priors;
};

// Marginalizes `vars` out of `factors` and `priors`, linearized at the
// current values. Variables in `constants` are held fixed. The result is
// a prior on the remaining variables (empty keys if nothing remains).
// Throws EvaluationFailure.
LinearizedPrior marginalize(
  const Graph & g, const std::set<VariableKey> & vars, const std::vector<FactorPtr> & factors,
  const std::vector<LinearizedPrior> & priors, const std::set<VariableKey> & constants);

// Levenberg-Marquardt with Marquardt damping. Without `freeVars` every
// valued variable is optimized over all factors; otherwise only the given
// variables move and only factors adjacent to them are evaluated.
// Throws EvaluationFailure and SingularSystem.
OptimizerResult optimize(
  Graph & g, const OptimizerConfig & cfg = OptimizerConfig(),
  const std::vector<VariableKey> * freeVars = nullptr);
OptimizerResult optimize(Graph & g, const OptimizerConfig & cfg, const SubProblem & sub);
}  // namespace fidslam
#endif  // FIDSLAM__OPTIMIZER_HPP_
