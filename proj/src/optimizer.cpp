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

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <fidslam/errors.hpp>
#include <fidslam/optimizer.hpp>
#include <set>

namespace fidslam
{
static constexpr double kRankTolerance = 1e-10;

void OptimizerConfig::validate() const
{
  if (
    maxIterations <= 0 || !(initialLambda > 0) || !(lambdaUp > 1) || !(lambdaDown > 1) ||
    !(relativeTolerance > 0) || !(absoluteTolerance > 0) || !(maxLambda > initialLambda)) {
    throw ValidationError("invalid optimizer configuration");
  }
}

std::string toString(OptimizerStatus s)
{
  switch (s) {
    case OptimizerStatus::Converged:
      return ("converged");
    case OptimizerStatus::MaxIterations:
      return ("max_iter");
    case OptimizerStatus::Stalled:
      return ("stalled");
  }
  return ("?");
}

LinearSystem::LinearSystem(std::vector<VariableKey> vars) : keys_(std::move(vars))
{
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  for (size_t i = 0; i < keys_.size(); i++) {
    index_[keys_[i]] = static_cast<int>(i);
  }
  b_ = Eigen::VectorXd::Zero(6 * keys_.size());
}

int LinearSystem::index(const VariableKey & k) const
{
  const auto it = index_.find(k);
  return (it == index_.end() ? -1 : it->second);
}

bool LinearSystem::hasBlock(int i, int j) const
{
  return (blocks_.count({std::min(i, j), std::max(i, j)}) != 0);
}

void LinearSystem::add(const std::vector<VariableKey> & slotKeys, const Linearization & lin)
{
  // merge slots that refer to the same variable
  std::array<int, 4> idx{-1, -1, -1, -1};
  std::array<Eigen::Matrix<double, 8, 6>, 4> J;
  int n = 0;
  for (size_t s = 0; s < slotKeys.size(); s++) {
    const int vi = index(slotKeys[s]);
    if (vi < 0) {
      continue;
    }
    int m = 0;
    while (m < n && idx[m] != vi) {
      m++;
    }
    if (m == n) {
      idx[n] = vi;
      J[n] = lin.J[s];
      n++;
    } else {
      J[m] += lin.J[s];
    }
  }
  const int d = lin.dim;
  for (int a = 0; a < n; a++) {
    const auto Ja = J[a].topRows(d);
    b_.segment<6>(6 * idx[a]) += Ja.transpose() * lin.r.head(d);
    for (int c = 0; c < n; c++) {
      if (idx[a] > idx[c]) {
        continue;
      }
      const Matrix6 h = Ja.transpose() * J[c].topRows(d);
      auto it = blocks_.try_emplace({idx[a], idx[c]}, Matrix6::Zero()).first;
      it->second += h;
    }
  }
}

void LinearSystem::add(
  const std::vector<VariableKey> & keys, const Eigen::MatrixXd & J, const Eigen::VectorXd & r)
{
  std::vector<std::pair<int, int>> cols;  // (system index, column block)
  for (size_t s = 0; s < keys.size(); s++) {
    const int vi = index(keys[s]);
    if (vi >= 0) {
      cols.emplace_back(vi, static_cast<int>(s));
    }
  }
  for (const auto & [ia, sa] : cols) {
    const auto Ja = J.middleCols<6>(6 * sa);
    b_.segment<6>(6 * ia) += Ja.transpose() * r;
    for (const auto & [ic, sc] : cols) {
      if (ia > ic) {
        continue;
      }
      const Matrix6 h = Ja.transpose() * J.middleCols<6>(6 * sc);
      auto it = blocks_.try_emplace({ia, ic}, Matrix6::Zero()).first;
      it->second += h;
    }
  }
}

Eigen::MatrixXd LinearSystem::denseHessian() const
{
  const int n = 6 * numVariables();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (const auto & [ij, h] : blocks_) {
    H.block<6, 6>(6 * ij.first, 6 * ij.second) = h;
    if (ij.first != ij.second) {
      H.block<6, 6>(6 * ij.second, 6 * ij.first) = h.transpose();
    }
  }
  return (H);
}

Eigen::SparseMatrix<double> LinearSystem::sparseHessian() const
{
  const int n = 6 * numVariables();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(blocks_.size() * 72);
  for (const auto & [ij, h] : blocks_) {
    for (int r = 0; r < 6; r++) {
      for (int c = 0; c < 6; c++) {
        trip.emplace_back(6 * ij.first + r, 6 * ij.second + c, h(r, c));
        if (ij.first != ij.second) {
          trip.emplace_back(6 * ij.second + c, 6 * ij.first + r, h(r, c));
        }
      }
    }
  }
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return (H);
}

static Eigen::VectorXd dampingDiagonal(const Eigen::VectorXd & diag, double lambda)
{
  const double floor = 1e-12 * std::max(1.0, diag.maxCoeff());
  return (lambda * diag.cwiseMax(floor));
}

Eigen::VectorXd LinearSystem::solve(double lambda, int denseLimit) const
{
  if (numVariables() == 0) {
    return (Eigen::VectorXd());
  }
  if (numVariables() < denseLimit) {
    Eigen::MatrixXd H = denseHessian();
    H.diagonal() += dampingDiagonal(H.diagonal(), lambda);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      throw SingularSystem("damped normal equations not positive definite");
    }
    return (llt.solve(-b_));
  }
  Eigen::SparseMatrix<double> H = sparseHessian();
  const Eigen::VectorXd damp = dampingDiagonal(H.diagonal(), lambda);
  for (int i = 0; i < H.rows(); i++) {
    H.coeffRef(i, i) += damp(i);
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0).all()) {
    throw SingularSystem("damped normal equations not positive definite");
  }
  return (ldlt.solve(-b_));
}

void LinearSystem::checkRank(int denseLimit) const
{
  if (numVariables() == 0) {
    return;
  }
  // Jacobi-scaled so that pivots are comparable across rotation and
  // translation blocks and across noise magnitudes.
  Eigen::SparseMatrix<double> H = sparseHessian();
  const Eigen::VectorXd diag = H.diagonal();
  for (int i = 0; i < diag.size(); i++) {
    if (!(diag(i) > 0)) {
      throw SingularSystem(
        "unconstrained variable " + keys_[i / 6].str() + " (no anchoring prior?)");
    }
  }
  const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
  Eigen::VectorXd pivots;
  if (numVariables() < denseLimit) {
    const Eigen::MatrixXd Hs = s.asDiagonal() * denseHessian() * s.asDiagonal();
    pivots = Eigen::LDLT<Eigen::MatrixXd>(Hs).vectorD();
  } else {
    const Eigen::SparseMatrix<double> Hs = s.asDiagonal() * H * s.asDiagonal();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hs);
    pivots = ldlt.vectorD();
  }
  if (!(pivots.minCoeff() > kRankTolerance)) {
    throw SingularSystem("rank-deficient system: gauge not fixed or variable under-constrained");
  }
}

Eigen::VectorXd LinearizedPrior::residual(const Graph & g) const
{
  Eigen::VectorXd dx(6 * keys.size());
  for (size_t i = 0; i < keys.size(); i++) {
    dx.segment<6>(6 * i) = ominus(g.value(keys[i]), origin[i]);
  }
  return (R * dx + r0);
}

Eigen::MatrixXd LinearizedPrior::jacobian(const Graph & g) const
{
  // d ominus(x exp(d), x0) / d d = blockdiag(Jr^-1(phi), R0^T R)
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(6 * keys.size(), 6 * keys.size());
  for (size_t i = 0; i < keys.size(); i++) {
    const Pose rel = origin[i].inverse() * g.value(keys[i]);
    D.block<3, 3>(6 * i, 6 * i) = rightJacobianInverse(rel.rotation().log());
    D.block<3, 3>(6 * i + 3, 6 * i + 3) = rel.rotation().matrix();
  }
  return (R * D);
}

bool LinearizedPrior::involves(const VariableKey & k) const
{
  return (std::find(keys.begin(), keys.end(), k) != keys.end());
}

LinearizedPrior marginalize(
  const Graph & g, const std::set<VariableKey> & vars, const std::vector<FactorPtr> & factors,
  const std::vector<LinearizedPrior> & priors, const std::set<VariableKey> & constants)
{
  std::set<VariableKey> all(vars.begin(), vars.end());
  for (const auto & f : factors) {
    for (const auto & k : f->keys()) {
      all.insert(k);
    }
  }
  for (const auto & p : priors) {
    all.insert(p.keys.begin(), p.keys.end());
  }
  std::vector<VariableKey> order(vars.begin(), vars.end());
  for (const auto & k : all) {
    if (!vars.count(k) && !constants.count(k)) {
      order.push_back(k);
    }
  }
  LinearizedPrior prior;
  if (order.size() == vars.size()) {
    return (prior);  // nothing remains to carry the information
  }
  // keep the marginalized variables first
  const int nm = 6 * static_cast<int>(vars.size());
  LinearSystem sys(order);
  Linearization lin;
  for (const auto & f : factors) {
    try {
      linearize(*f, g.slotValues(*f), &lin, true);
    } catch (const PointBehindCamera & e) {
      throw EvaluationFailure(f->id, "factor " + std::to_string(f->id) + ": " + e.what());
    }
    sys.add(f->keys(), lin);
  }
  for (const auto & p : priors) {
    sys.add(p.keys, p.jacobian(g), p.residual(g));
  }
  // the system sorts its keys, so permute into [marginalized, kept]
  const int n = 6 * static_cast<int>(order.size());
  Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
  for (size_t i = 0; i < order.size(); i++) {
    const int si = sys.index(order[i]);
    for (int d = 0; d < 6; d++) {
      P.indices()(6 * i + d) = 6 * si + d;
    }
  }
  const Eigen::MatrixXd Hs = sys.denseHessian();
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; i++) {
    b(i) = sys.gradient()(P.indices()(i));
    for (int j = 0; j < n; j++) {
      H(i, j) = Hs(P.indices()(i), P.indices()(j));
    }
  }
  const int nk = n - nm;
  const Eigen::LDLT<Eigen::MatrixXd> mm(H.topLeftCorner(nm, nm));
  const Eigen::MatrixXd Hk =
    H.bottomRightCorner(nk, nk) - H.bottomLeftCorner(nk, nm) * mm.solve(H.topRightCorner(nm, nk));
  const Eigen::VectorXd bk = b.tail(nk) - H.bottomLeftCorner(nk, nm) * mm.solve(b.head(nm));
  // square root H = R^T R and R^T r0 = b from the eigen decomposition,
  // dropping directions without information
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Hk + Hk.transpose()));
  const double floor = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int rank = 0;
  for (int i = 0; i < nk; i++) {
    rank += es.eigenvalues()(i) > floor;
  }
  prior.keys.assign(order.begin() + vars.size(), order.end());
  for (const auto & k : prior.keys) {
    prior.origin.push_back(g.value(k));
  }
  prior.R.resize(rank, nk);
  prior.r0.resize(rank);
  for (int i = nk - rank, row = 0; i < nk; i++, row++) {
    const double l = es.eigenvalues()(i);
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    prior.R.row(row) = std::sqrt(l) * v.transpose();
    prior.r0(row) = v.dot(bk) / std::sqrt(l);
  }
  return (prior);
}

namespace
{
struct Problem
{
  std::vector<VariableKey> vars;
  std::vector<FactorPtr> factors;
  const std::vector<LinearizedPrior> * priors{nullptr};
};

Problem makeProblem(const Graph & g, const std::vector<VariableKey> * freeVars)
{
  Problem p;
  if (freeVars == nullptr) {
    for (const auto & [k, v] : g.variables()) {
      if (v) {
        p.vars.push_back(k);
      }
    }
    for (const auto & [id, f] : g.factors()) {
      p.factors.push_back(f);
    }
    return (p);
  }
  std::set<uint64_t> ids;
  for (const auto & k : *freeVars) {
    if (!g.hasValue(k)) {
      throw Error("free variable without value: " + k.str());
    }
    p.vars.push_back(k);
    const auto & adj = g.adjacentFactors(k);
    ids.insert(adj.begin(), adj.end());
  }
  std::sort(p.vars.begin(), p.vars.end());
  for (const auto id : ids) {
    p.factors.push_back(g.factor(id));
  }
  return (p);
}

Problem makeProblem(const Graph & g, const SubProblem & sub)
{
  Problem p;
  std::set<uint64_t> ids;
  for (const auto & k : sub.freeVars) {
    if (!g.hasValue(k)) {
      throw Error("free variable without value: " + k.str());
    }
    p.vars.push_back(k);
    for (const uint64_t id : g.adjacentFactors(k)) {
      if (!sub.excludedFactors.count(id)) {
        ids.insert(id);
      }
    }
  }
  std::sort(p.vars.begin(), p.vars.end());
  for (const auto id : ids) {
    p.factors.push_back(g.factor(id));
  }
  p.priors = &sub.priors;
  return (p);
}

double evaluate(const Graph & g, const Problem & p)
{
  double sum = 0;
  for (const auto & f : p.factors) {
    sum += g.factorError(*f);
  }
  if (p.priors != nullptr) {
    for (const auto & pr : *p.priors) {
      sum += pr.error(g);
    }
  }
  return (sum);
}

LinearSystem linearizeProblem(const Graph & g, const Problem & p)
{
  LinearSystem sys(p.vars);
  Linearization lin;
  for (const auto & f : p.factors) {
    try {
      linearize(*f, g.slotValues(*f), &lin, true);
    } catch (const PointBehindCamera & e) {
      throw EvaluationFailure(f->id, "factor " + std::to_string(f->id) + ": " + e.what());
    }
    sys.add(f->keys(), lin);
  }
  if (p.priors != nullptr) {
    for (const auto & pr : *p.priors) {
      sys.add(pr.keys, pr.jacobian(g), pr.residual(g));
    }
  }
  return (sys);
}

OptimizerResult run(Graph & g, const OptimizerConfig & cfg, const Problem & p);
}  // namespace

OptimizerResult optimize(
  Graph & g, const OptimizerConfig & cfg, const std::vector<VariableKey> * freeVars)
{
  return (run(g, cfg, makeProblem(g, freeVars)));
}

OptimizerResult optimize(Graph & g, const OptimizerConfig & cfg, const SubProblem & sub)
{
  return (run(g, cfg, makeProblem(g, sub)));
}

namespace
{

OptimizerResult run(Graph & g, const OptimizerConfig & cfg, const Problem & p)
{
  OptimizerResult res;
  double err = evaluate(g, p);
  res.initialError = res.finalError = err;
  if (err <= cfg.absoluteTolerance || p.vars.empty()) {
    return (res);
  }
  LinearSystem sys = linearizeProblem(g, p);
  sys.checkRank();
  double lambda = cfg.initialLambda;
  std::vector<Pose> saved(p.vars.size());
  res.status = OptimizerStatus::MaxIterations;
  for (res.iterations = 1; res.iterations <= cfg.maxIterations; res.iterations++) {
    bool accepted = false;
    Eigen::VectorXd delta;
    try {
      delta = sys.solve(lambda);
    } catch (const SingularSystem &) {
      delta.resize(0);
    }
    if (delta.size() > 0) {
      for (size_t i = 0; i < p.vars.size(); i++) {
        saved[i] = g.value(p.vars[i]);
        g.setValue(p.vars[i], retract(saved[i], delta.segment<6>(6 * i)));
      }
      try {
        const double newErr = evaluate(g, p);
        accepted = newErr < err;
        if (accepted) {
          const double decrease = err - newErr;
          err = newErr;
          res.errorHistory.push_back(err);
          if (decrease <= cfg.relativeTolerance * err || err <= cfg.absoluteTolerance) {
            res.status = OptimizerStatus::Converged;
            break;
          }
        }
      } catch (const EvaluationFailure & e) {
        if (lambda * cfg.lambdaUp > cfg.maxLambda) {
          for (size_t i = 0; i < p.vars.size(); i++) {
            g.setValue(p.vars[i], saved[i]);
          }
          throw;
        }
      }
      if (!accepted) {
        for (size_t i = 0; i < p.vars.size(); i++) {
          g.setValue(p.vars[i], saved[i]);
        }
      }
    }
    if (accepted) {
      lambda = std::max(lambda / cfg.lambdaDown, 1e-12);
      sys = linearizeProblem(g, p);
    } else {
      lambda *= cfg.lambdaUp;
      if (lambda > cfg.maxLambda) {
        res.status = OptimizerStatus::Stalled;
        break;
      }
    }
  }
  res.iterations = std::min(res.iterations, cfg.maxIterations);
  res.finalError = err;
  return (res);
}
}  // namespace
}  // namespace fidslam
