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
#include <deque>
#include <fidslam/errors.hpp>
#include <fidslam/initializer.hpp>
#include <limits>

namespace fidslam
{
static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
static constexpr double kInf = std::numeric_limits<double>::infinity();
// pins live in their own id range so they never collide with measurements
static constexpr uint64_t kPinIdBase = uint64_t(1) << 62;

InitializerConfig InitializerConfig::fromScene(const Scene & scene)
{
  InitializerConfig c;
  c.ambiguityRule = scene.ambiguityRule;
  c.ambiguityRatioThreshold = scene.ambiguityRatioThreshold;
  c.maxAmbiguousViewAngle = scene.maxAmbiguousViewAngle;
  c.subgraphErrorThreshold = scene.subgraphErrorThreshold;
  return (c);
}

std::string toString(Verdict v)
{
  switch (v) {
    case Verdict::Accepted:
      return ("accepted");
    case Verdict::Rejected:
      return ("rejected");
    case Verdict::Deferred:
      return ("deferred");
  }
  return ("unknown");
}

// ------------------------------ state ---------------------------------

TwoGraphState::TwoGraphState(const InitializerConfig & cfg) : config_(cfg)
{
  config_.optimizer.validate();
}

std::set<VariableKey> TwoGraphState::determined() const
{
  std::set<VariableKey> s;
  for (const auto & [k, v] : optimized_.variables()) {
    if (v) {
      s.insert(k);
    }
  }
  return (s);
}

int64_t TwoGraphState::determinedAt(const VariableKey & k) const
{
  const auto it = determinedAt_.find(k);
  return (it == determinedAt_.end() ? -1 : it->second);
}

FactorPtr TwoGraphState::makeFactor(
  std::variant<AbsolutePosePrior, RelativePosePrior, TagProjection> data, bool pin)
{
  auto f = std::make_shared<Factor>();
  f->id = nextId_++;
  f->data = std::move(data);
  f->pin = pin;
  return (f);
}

const std::optional<AmbiguousPose> & TwoGraphState::ambiguity(const Factor & f) const
{
  auto it = ambiguity_.find(f.id);
  if (it == ambiguity_.end()) {
    std::optional<AmbiguousPose> a;
    const TagProjection * p = f.projection();
    if (p) {
      try {
        a = ambiguityCheck(p->corners, p->intrinsics, p->tagSize);
      } catch (const Error &) {
        // no usable pose: the factor can only constrain, never initialize
      }
    }
    it = ambiguity_.emplace(f.id, a).first;
  }
  return (it->second);
}

bool TwoGraphState::passesGate(const Factor & f) const
{
  const auto & a = ambiguity(f);
  return (
    a && isUnambiguous(
           *a, config_.ambiguityRule, config_.ambiguityRatioThreshold,
           config_.maxAmbiguousViewAngle));
}

// ----------------------------- ordering -------------------------------

static int tier(const Factor & f)
{
  switch (f.kind()) {
    case FactorKind::RelativePrior:
      return (0);
    case FactorKind::Projection:
      return (1);
    default:
      return (2);
  }
}

bool factorOrderLess(const Factor & a, const Factor & b)
{
  const int ta = tier(a);
  const int tb = tier(b);
  if (ta != tb) {
    return (ta < tb);
  }
  if (ta == 0) {
    const auto & ra = std::get<RelativePosePrior>(a.data);
    const auto & rb = std::get<RelativePosePrior>(b.data);
    const auto ka = std::tie(ra.a.time, ra.a.name, ra.b.name);
    const auto kb = std::tie(rb.a.time, rb.a.name, rb.b.name);
    return (ka < kb);
  } else if (ta == 1) {
    const TagProjection & pa = *a.projection();
    const TagProjection & pb = *b.projection();
    const double aa = pixelArea(pa.corners);
    const double ab = pixelArea(pb.corners);
    if (aa != ab) {
      return (aa > ab);
    }
    const auto ka = std::tie(pa.frame, pa.camera, pa.tagId);
    const auto kb = std::tie(pb.frame, pb.camera, pb.tagId);
    return (ka < kb);
  }
  return (false);  // equal: the stable sort keeps the input order
}

std::vector<FactorPtr> orderNewFactors(std::vector<FactorPtr> factors)
{
  std::stable_sort(factors.begin(), factors.end(), [](const FactorPtr & a, const FactorPtr & b) {
    return (factorOrderLess(*a, *b));
  });
  return (factors);
}

// ---------------------------- discovery -------------------------------

static std::vector<VariableKey> distinctKeys(const Factor & f)
{
  std::vector<VariableKey> keys;
  for (const auto & k : f.keys()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      keys.push_back(k);
    }
  }
  return (keys);
}

// true if the factor alone fixes variable v once its other variables are known
static bool canDetermine(const TwoGraphState & state, const Factor & f, const VariableKey & v)
{
  switch (f.kind()) {
    case FactorKind::AbsolutePrior:
      return (std::get<AbsolutePosePrior>(f.data).target == v);
    case FactorKind::RelativePrior:
      return (true);
    case FactorKind::Projection: {
      const TagProjection & p = *f.projection();
      if (!state.ambiguity(f)) {
        return (false);
      }
      if (v == p.tag) {
        return (state.passesGate(f));
      }
      // a camera seeing a tag on its own rig says nothing about the rig pose
      return (!(p.body == p.rig && v == p.body));
    }
  }
  return (false);
}

// value of v implied by factor f, given values of all other variables
static Pose solveFor(
  const TwoGraphState & state, const Factor & f, const VariableKey & v, const Graph & g)
{
  switch (f.kind()) {
    case FactorKind::AbsolutePrior:
      return (std::get<AbsolutePosePrior>(f.data).mean);
    case FactorKind::RelativePrior: {
      const auto & r = std::get<RelativePosePrior>(f.data);
      if (v == r.a) {
        return (g.value(r.b) * r.delta);
      }
      return (g.value(r.a) * r.delta.inverse());
    }
    case FactorKind::Projection: {
      const TagProjection & p = *f.projection();
      const Pose camTag = state.ambiguity(f)->best;
      // world-from-tag along the body chain equals the one along the camera chain:
      // wBody * bodyTag = wRig * rigCam * camTag
      if (v == p.tag) {
        return (g.value(p.body).inverse() * g.value(p.rig) * g.value(p.cam) * camTag);
      }
      if (v == p.body) {
        return (g.value(p.rig) * g.value(p.cam) * camTag * g.value(p.tag).inverse());
      }
      if (v == p.rig) {
        return (
          g.value(p.body) * g.value(p.tag) * camTag.inverse() * g.value(p.cam).inverse());
      }
      return (g.value(p.rig).inverse() * g.value(p.body) * g.value(p.tag) * camTag.inverse());
    }
  }
  throw InitializationImpossible("unknown factor kind");
}

static bool touches(const Factor & f, const std::set<VariableKey> & vars)
{
  if (vars.empty()) {
    return (false);
  }
  for (const auto & k : f.keys()) {
    if (vars.count(k)) {
      return (true);
    }
  }
  return (false);
}

static FactorPtr makePin(
  const TwoGraphState & state, const VariableKey & k, const Pose & value, uint64_t id)
{
  auto f = std::make_shared<Factor>();
  f->id = id;
  f->pin = true;
  f->data = AbsolutePosePrior{
    k, value,
    PoseNoise::isotropic(state.config().pinRotationSigma, state.config().pinTranslationSigma)};
  return (f);
}

Subgraph discoverSubgraph(
  const TwoGraphState & state, const FactorPtr & seed, const std::set<uint64_t> & claimed,
  const std::set<VariableKey> & claimedVars)
{
  Subgraph sg;
  const Graph & full = state.full();
  std::set<uint64_t> inSg;
  std::set<VariableKey> newVars;
  auto known = [&](const VariableKey & k) {
    return (state.isDetermined(k) || newVars.count(k) != 0);
  };
  auto eligible = [&](const Factor & f) {
    return (
      !f.pin && !inSg.count(f.id) && !state.isAbsorbed(f.id) && !state.isRetired(f.id) &&
      !claimed.count(f.id) && !touches(f, claimedVars));
  };
  std::deque<FactorPtr> frontier{seed};
  while (!frontier.empty()) {
    const FactorPtr f = frontier.front();
    frontier.pop_front();
    if (!eligible(*f)) {
      continue;
    }
    std::vector<VariableKey> unknown;
    for (const auto & k : distinctKeys(*f)) {
      if (!known(k)) {
        unknown.push_back(k);
      }
    }
    if (unknown.size() > 1 || (unknown.size() == 1 && !canDetermine(state, *f, unknown[0]))) {
      continue;  // revisited once more of its variables become determinable
    }
    inSg.insert(f->id);
    sg.initList.push_back(f);
    if (unknown.empty()) {
      continue;
    }
    const VariableKey & v = unknown[0];
    newVars.insert(v);
    sg.newVariables.push_back(v);
    std::vector<FactorPtr> next;
    for (const uint64_t id : full.adjacentFactors(v)) {
      const FactorPtr & n = full.factor(id);
      if (eligible(*n)) {
        next.push_back(n);
      }
    }
    next = orderNewFactors(std::move(next));
    frontier.insert(frontier.end(), next.begin(), next.end());
  }
  // previously determined variables in scope: old dynamic poses are pinned,
  // static ones bring their priors from the optimized graph (or are pinned)
  std::set<VariableKey> scope;
  for (const auto & f : sg.initList) {
    for (const auto & k : f->keys()) {
      if (state.isDetermined(k)) {
        scope.insert(k);
      }
    }
  }
  uint64_t pinId = kPinIdBase;
  const Graph & opt = state.optimized();
  for (const auto & k : scope) {
    bool hasPrior = false;
    if (!k.isDynamic()) {
      for (const uint64_t id : opt.adjacentFactors(k)) {
        const FactorPtr & f = opt.factor(id);
        if (f->kind() == FactorKind::AbsolutePrior) {
          sg.context.push_back(f);
          hasPrior = true;
        }
      }
    }
    if (!hasPrior) {
      sg.context.push_back(makePin(state, k, opt.value(k), pinId++));
      sg.pinned.push_back(k);
    }
  }
  return (sg);
}

// --------------------------- initialization ----------------------------

void initializeSubgraph(
  const TwoGraphState & state, const Subgraph & sg, const std::vector<FactorPtr> & order,
  Graph * g)
{
  for (const auto & f : sg.context) {
    g->addFactor(f);
  }
  for (const auto & f : order) {
    g->addFactor(f);
  }
  for (const auto & [k, v] : g->variables()) {
    if (state.isDetermined(k)) {
      g->setValue(k, state.optimized().value(k));
    }
  }
  // Walk the list repeatedly: after a rotation a factor may be reached
  // before the factor that determines one of its variables.
  bool progress = true;
  std::set<uint64_t> used;
  while (progress) {
    progress = false;
    for (const auto & f : order) {
      if (used.count(f->id)) {
        continue;
      }
      std::vector<VariableKey> unknown;
      for (const auto & k : distinctKeys(*f)) {
        if (!g->hasValue(k)) {
          unknown.push_back(k);
        }
      }
      if (unknown.empty()) {
        used.insert(f->id);
      } else if (unknown.size() == 1 && canDetermine(state, *f, unknown[0])) {
        g->setValue(unknown[0], solveFor(state, *f, unknown[0], *g));
        used.insert(f->id);
        progress = true;
      }
    }
  }
  for (const auto & k : sg.newVariables) {
    if (!g->hasValue(k)) {
      throw InitializationImpossible("cannot initialize " + k.str());
    }
  }
}

// ----------------------------- validation ------------------------------

// mean over non-pin factors of |r|^2 / dim, after g.totalError()
static double errorPerFactor(const Graph & g)
{
  double sum = 0;
  int n = 0;
  for (const auto & [id, f] : g.factors()) {
    if (f->pin) {
      continue;
    }
    const double norm = g.residualNorms().at(id);
    sum += norm * norm / f->dim();
    n++;
  }
  return (n > 0 ? sum / n : 0.0);
}

bool validateAndTransfer(
  TwoGraphState & state, const Subgraph & sg, int64_t frame, SubgraphReport * report,
  std::map<uint64_t, double> * factorErrors)
{
  const double threshold = state.config().subgraphErrorThreshold;
  const size_t n = sg.initList.size();
  report->factors.clear();
  for (const auto & f : sg.initList) {
    report->factors.push_back(f->id);
  }
  report->newVariables = sg.newVariables;
  report->accepted = false;
  report->errorPerFactor = kInf;
  factorErrors->clear();
  for (size_t rot = 0; rot < std::max<size_t>(n, 1); rot++) {
    std::vector<FactorPtr> order(sg.initList.begin() + rot, sg.initList.end());
    order.insert(order.end(), sg.initList.begin(), sg.initList.begin() + rot);
    Graph g;
    double err = kInf;
    try {
      initializeSubgraph(state, sg, order, &g);
      optimize(g, state.config().optimizer);
      g.totalError();
      err = errorPerFactor(g);
    } catch (const InitializationImpossible &) {
      throw;
    } catch (const Error &) {
      // a failed optimization counts as a failed ordering
      report->rotations = static_cast<int>(rot);
      continue;
    }
    report->rotations = static_cast<int>(rot);
    if (err < report->errorPerFactor) {
      report->errorPerFactor = err;
      factorErrors->clear();
      for (const auto & [id, f] : g.factors()) {
        if (!f->pin) {
          (*factorErrors)[id] = g.residualNorms().at(id);
        }
      }
    }
    if (err <= threshold) {
      for (const auto & k : sg.newVariables) {
        state.optimized().setValue(k, g.value(k));
        state.markDetermined(k, frame);
      }
      for (const auto & f : sg.initList) {
        state.optimized().addFactor(f);
      }
      report->accepted = true;
      return (true);
    }
  }
  return (false);
}

// ------------------------------- rounds --------------------------------

void TwoGraphState::marginalize(const std::set<VariableKey> & vars)
{
  if (vars.empty()) {
    return;
  }
  std::set<uint64_t> ids;
  for (const auto & k : vars) {
    for (const uint64_t id : optimized_.adjacentFactors(k)) {
      if (!window_.excludedFactors.count(id)) {
        ids.insert(id);
      }
    }
  }
  std::vector<FactorPtr> factors;
  for (const uint64_t id : ids) {
    factors.push_back(optimized_.factor(id));
  }
  std::vector<LinearizedPrior> consumed, kept;
  for (auto & p : window_.priors) {
    const bool touches =
      std::any_of(vars.begin(), vars.end(), [&p](const VariableKey & k) { return (p.involves(k)); });
    (touches ? consumed : kept).push_back(std::move(p));
  }
  LinearizedPrior prior = fidslam::marginalize(optimized_, vars, factors, consumed, marginalized_);
  if (prior.R.rows() > 0) {
    kept.push_back(std::move(prior));
  }
  window_.priors = std::move(kept);
  window_.excludedFactors.insert(ids.begin(), ids.end());
  marginalized_.insert(vars.begin(), vars.end());
}

static void optimizeState(TwoGraphState & state, int64_t frame, RoundReport * rep)
{
  const int w = state.config().window;
  Graph & g = state.optimized();
  if (w <= 0) {
    rep->optimization = optimize(g, state.config().optimizer);
    return;
  }
  // Dynamic poses at or before frame - w leave the window: they keep their
  // values, and the information of their factors is retained as a
  // linearized prior on the variables they connect to.
  std::set<VariableKey> leaving;
  for (const auto & [k, v] : g.variables()) {
    if (v && k.isDynamic() && k.time <= frame - w && !state.isMarginalized(k)) {
      leaving.insert(k);
    }
  }
  state.marginalize(leaving);
  SubProblem sub = state.window();
  for (const auto & [k, v] : g.variables()) {
    if (v && !state.isMarginalized(k)) {
      sub.freeVars.push_back(k);
    }
  }
  if (!sub.freeVars.empty()) {
    rep->optimization = optimize(g, state.config().optimizer, sub);
  }
}

RoundReport processNewFactors(
  TwoGraphState & state, const std::vector<FactorPtr> & newFactors, int64_t frame)
{
  RoundReport rep;
  rep.frame = frame;
  for (const auto & f : newFactors) {
    state.addToFull(f);
  }
  std::map<uint64_t, FactorRecord> records;
  std::set<uint64_t> claimed;       // factors in a subgraph this round
  std::set<VariableKey> blocked;    // variables of rejected subgraphs this round
  std::vector<FactorPtr> seeds = orderNewFactors(newFactors);
  bool anyAccepted = false;
  while (!seeds.empty()) {
    // discover disjoint subgraphs for this pass
    std::vector<Subgraph> sgs;
    std::set<VariableKey> claimedVars = blocked;
    for (const auto & seed : seeds) {
      if (claimed.count(seed->id) || state.isAbsorbed(seed->id) || state.isRetired(seed->id)) {
        continue;
      }
      Subgraph sg = discoverSubgraph(state, seed, claimed, claimedVars);
      if (sg.empty()) {
        continue;
      }
      for (const auto & f : sg.initList) {
        claimed.insert(f->id);
      }
      claimedVars.insert(sg.newVariables.begin(), sg.newVariables.end());
      sgs.push_back(std::move(sg));
    }
    std::set<VariableKey> newlyDetermined;
    for (const auto & sg : sgs) {
      SubgraphReport sr;
      std::map<uint64_t, double> errors;
      const bool ok = validateAndTransfer(state, sg, frame, &sr, &errors);
      if (ok) {
        anyAccepted = true;
        newlyDetermined.insert(sg.newVariables.begin(), sg.newVariables.end());
        for (const auto & f : sg.initList) {
          records[f->id] = FactorRecord{f->id, Verdict::Accepted, kNaN, sr.rotations};
        }
      } else {
        blocked.insert(sg.newVariables.begin(), sg.newVariables.end());
        for (const auto & f : sg.initList) {
          if (f->kind() == FactorKind::Projection) {
            state.retire(f->id);
          }
        }
        for (const auto & [id, e] : errors) {
          records[id] = FactorRecord{id, Verdict::Rejected, e, sr.rotations};
        }
        for (const auto & f : sg.initList) {
          records.try_emplace(f->id, FactorRecord{f->id, Verdict::Rejected, kNaN, sr.rotations});
        }
      }
      rep.subgraphs.push_back(std::move(sr));
    }
    // factors next to freshly determined variables may now be usable
    std::vector<FactorPtr> next;
    std::set<uint64_t> seen;
    for (const auto & k : newlyDetermined) {
      for (const uint64_t id : state.full().adjacentFactors(k)) {
        const FactorPtr & f = state.full().factor(id);
        if (
          seen.insert(id).second && !claimed.count(id) && !state.isAbsorbed(id) &&
          !state.isRetired(id)) {
          next.push_back(f);
        }
      }
    }
    seeds = orderNewFactors(std::move(next));
  }
  if (anyAccepted) {
    optimizeState(state, frame, &rep);
    for (auto & [id, r] : records) {
      if (r.verdict == Verdict::Accepted) {
        r.error = std::sqrt(2.0 * state.optimized().factorError(id));
      }
    }
  }
  for (const auto & f : newFactors) {
    records.try_emplace(f->id, FactorRecord{f->id, Verdict::Deferred, kNaN, 0});
  }
  for (const auto & [id, r] : records) {
    rep.records.push_back(r);
  }
  return (rep);
}
}  // namespace fidslam
