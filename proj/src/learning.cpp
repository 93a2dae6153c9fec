#include "graspmc/learning.hpp"

#include <cmath>
#include <string>

#include "graspmc/error.hpp"
#include "graspmc/vmf.hpp"

namespace graspmc {

void Tallies::add(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::Success: ++success; break;
    case OutcomeKind::Slipped: ++slipped; break;
    case OutcomeKind::Collision: ++collision; break;
    case OutcomeKind::Miss: ++miss; break;
  }
}

void LearningParams::validate() const {
  kameleon.validate();
  darting.validate();
}

namespace {

Vector walkProposal(const Vector& x, StateSpace space, const SketchParams& p, Rng& rng) {
  Vector y = x;
  if (space == StateSpace::Grasp) {
    for (int i = 0; i < 3; ++i) y(i) = x(i) + p.positionSigma * rng.normal();
    const VonMisesFisher vmf(Vector(x.segment<4>(3)), p.kappa);
    y.segment<4>(3) = vmf.sample(rng);
  } else {
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = x(i) + p.positionSigma * rng.normal();
  }
  projectToStateSpace(y, space);
  return y;
}

}  // namespace

RoughSketch buildRoughSketch(const TargetDensity& target, StateSpace space, const Vector& start,
                             const SketchParams& params, Rng& rng) {
  if (start.size() != target.dimension()) throw Error(ErrorCode::InvalidArgument, "buildRoughSketch: bad start");
  if (!(params.positionSigma >= 0.0) || !(params.kappa >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "buildRoughSketch: sigma and kappa must be >= 0");
  }
  RoughSketch sketch;
  sketch.params = params;
  sketch.params.random = false;
  Vector current = start;
  projectToStateSpace(current, space);
  sketch.start = current;
  double density = target.evaluate(current).density;
  ++sketch.evaluations;
  sketch.proposals.reserve(params.iterations);

  for (std::size_t i = 0; i < params.iterations; ++i) {
    Vector proposal = walkProposal(current, space, params, rng);
    const Evaluation eval = target.evaluate(proposal);
    ++sketch.evaluations;
    const double u = rng.uniform();
    const bool accepted = metropolisDecision(density, eval.density, 0.0, u);
    sketch.proposals.push_back(ProposalRecord{proposal, eval.density, eval.outcome, accepted, false});
    if (accepted) {
      current = std::move(proposal);
      density = eval.density;
    }
  }
  return sketch;
}

RoughSketch buildRandomSketch(const TargetDensity& target, const Vector& lower, const Vector& upper, std::size_t count,
                              Rng& rng) {
  if (target.dimension() != 7 || lower.size() != 3 || upper.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "buildRandomSketch: expects grasp states and 3D bounds");
  }
  RoughSketch sketch;
  sketch.params.iterations = count;
  sketch.params.random = true;
  sketch.proposals.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector s(7);
    for (int k = 0; k < 3; ++k) s(k) = rng.uniform(lower(k), upper(k));
    const VonMisesFisher uniformSphere(Vector::Unit(4, 0), 0.0);
    s.segment<4>(3) = uniformSphere.sample(rng);
    projectToStateSpace(s, StateSpace::Grasp);
    const Evaluation eval = target.evaluate(s);
    ++sketch.evaluations;
    sketch.proposals.push_back(ProposalRecord{s, eval.density, eval.outcome, false, false});
  }
  if (count > 0) sketch.start = sketch.proposals.front().state;
  return sketch;
}

namespace {

void runCombined(LearnedModel& model, const TargetDensity& target, Vector current, double density, Rng& rng) {
  const LearningParams& p = model.params;
  const std::size_t total = p.kameleon.burnInIterations + p.iterations;
  KameleonSampler sampler(p.kameleon, p.space);

  for (std::size_t it = 0; it < total; ++it) {
    const double u1 = rng.uniform();
    const bool local = p.invertPCheck ? (u1 >= p.darting.pCheck) : (u1 < p.darting.pCheck);
    if (!local) {
      DartingStepResult dart = dartingStep(current, density, model.regions, target, p.darting, p.space, rng);
      if (dart.attempted()) {
        ++model.stats.jumpAttempts;
        if (dart.jumped()) ++model.stats.jumpsAccepted;
        model.chain.recordStep(ProposalRecord{dart.proposal, dart.proposalEvaluation.density,
                                              dart.proposalEvaluation.outcome, dart.jumped(), true},
                               dart.next, dart.nextDensity);
        current = std::move(dart.next);
        density = dart.nextDensity;
        continue;
      }
      ++model.stats.jumpFallbacks;
    }
    if (adaptationSchedule(it, p.kameleon) || !sampler.adapted()) sampler.adapt(model.chain, rng);
    KameleonStepResult step = sampler.step(current, density, target, model.chain, rng);
    ++model.stats.localSteps;
    if (step.accepted) ++model.stats.localAccepted;
    current = std::move(step.next);
    density = step.nextDensity;
  }
}

std::vector<JumpRegion> regionsAround(const std::vector<Vector>& modes, const Matrix& covariance,
                                      const DartingConfig& config) {
  std::vector<JumpRegion> regions;
  regions.reserve(modes.size());
  for (const auto& m : modes) regions.push_back(buildJumpRegion(m, covariance, config));
  return regions;
}

}  // namespace

LearnedModel activeLearn(const TargetDensity& target, const RoughSketch& sketch, const std::vector<Vector>& demonstrations,
                         const LearningParams& params, Rng& rng, std::string objectName) {
  params.validate();
  if (demonstrations.empty()) throw Error(ErrorCode::InvalidDemonstration, "activeLearn: no demonstrations");
  if (sketch.proposals.empty()) throw Error(ErrorCode::EmptyHistory, "activeLearn: empty rough sketch");

  LearnedModel model{ChainHistory(ChainHistory::Pool::Proposals), {}, {}, Matrix(), std::move(objectName), params, rng.seed(), {}, {}};
  for (const auto& p : sketch.proposals) model.chain.inheritProposal(p);

  std::vector<double> densities;
  for (const auto& d : demonstrations) {
    Vector mode = d;
    projectToStateSpace(mode, params.space);
    const double density = target.evaluate(mode).density;
    if (!(density > 0.0)) {
      throw Error(ErrorCode::InvalidDemonstration, "activeLearn: demonstration with zero density");
    }
    model.chain.seedState(mode, density);
    model.modes.push_back(mode);
    densities.push_back(density);
  }

  std::vector<Vector> sketchStates;
  sketchStates.reserve(sketch.proposals.size());
  for (const auto& p : sketch.proposals) sketchStates.push_back(p.state);
  model.regionCovariance = sampleCovariance(sketchStates);
  model.regions = regionsAround(model.modes, model.regionCovariance, params.darting);

  const std::size_t start = rng.index(model.modes.size());
  runCombined(model, target, model.modes[start], densities[start], rng);
  model.modeDensities = std::move(densities);
  return model;
}

LearnedModel transferLearn(const TargetDensity& target, const LearnedModel& source, ModeSource modeSource,
                           const std::vector<Vector>& actualModes, const LearningParams& params, Rng& rng,
                           std::string objectName) {
  params.validate();
  if (source.chain.empty()) throw Error(ErrorCode::EmptyHistory, "transferLearn: source chain is empty");

  LearnedModel model{ChainHistory(source.chain.pool()), {}, {}, Matrix(), std::move(objectName), params, rng.seed(), {}, {}};
  for (const auto& p : source.chain.proposals()) model.chain.inheritProposal(p);
  for (std::size_t i = 0; i < source.chain.states().size(); ++i) {
    model.chain.seedState(source.chain.states()[i], source.chain.densities()[i]);
  }

  if (modeSource == ModeSource::ActualObjectModes) {
    if (actualModes.empty()) throw Error(ErrorCode::InvalidDemonstration, "transferLearn: actual modes missing");
    model.modes = actualModes;
  } else {
    model.modes = source.modes;
  }
  if (model.modes.empty()) throw Error(ErrorCode::NoRegions, "transferLearn: no modes to place regions around");
  std::vector<double> densities;
  for (auto& m : model.modes) {
    projectToStateSpace(m, params.space);
    const double density = target.evaluate(m).density;
    if (modeSource == ModeSource::ActualObjectModes && !(density > 0.0)) {
      throw Error(ErrorCode::InvalidDemonstration, "transferLearn: actual mode with zero density on novel object");
    }
    densities.push_back(density);
  }

  model.regionCovariance = sampleCovariance(model.chain.poolStates());
  model.regions = regionsAround(model.modes, model.regionCovariance, params.darting);

  const std::size_t start = rng.index(model.modes.size());
  runCombined(model, target, model.modes[start], densities[start], rng);
  model.modeDensities = std::move(densities);
  return model;
}

Tallies tallyOutcomes(const std::vector<ProposalRecord>& proposals) {
  Tallies t;
  for (const auto& p : proposals) t.add(p.outcome);
  return t;
}

Tallies tallyOutcomes(const LearnedModel& model) {
  Tallies t;
  const auto& props = model.chain.proposals();
  for (std::size_t i = model.chain.inheritedProposals(); i < props.size(); ++i) t.add(props[i].outcome);
  return t;
}

}  // namespace graspmc
