#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "graspmc/darting.hpp"
#include "graspmc/kameleon.hpp"
#include "graspmc/linalg.hpp"
#include "graspmc/rng.hpp"
#include "graspmc/target.hpp"

namespace graspmc {

struct SketchParams {
  std::size_t iterations = 1100;
  double positionSigma = 0.2;
  double kappa = 50.0;
  /// Uniform poses instead of a random walk.
  bool random = false;
};

/// Every proposal of a preliminary random walk, accepted or not.
struct RoughSketch {
  std::vector<ProposalRecord> proposals;
  std::string sourceObject;
  SketchParams params;
  Vector start;
  /// Target evaluations spent building the sketch.
  std::uint64_t evaluations = 0;
};

/// Random-walk MH. In grasp space the position block moves by N(p, sigma^2 I3)
/// and the orientation block by vMF(q, kappa); in Euclidean space every
/// coordinate moves by N(x, sigma^2 I). Both proposals are symmetric, so the
/// acceptance ratio is the density ratio alone.
RoughSketch buildRoughSketch(const TargetDensity& target, StateSpace space, const Vector& start,
                             const SketchParams& params, Rng& rng);

/// `count` uniform poses: positions uniform in [lower, upper], orientations
/// uniform on S^3. Each is evaluated so the sketch carries outcome labels.
RoughSketch buildRandomSketch(const TargetDensity& target, const Vector& lower, const Vector& upper, std::size_t count,
                              Rng& rng);

struct LearningParams {
  KameleonConfig kameleon;
  DartingConfig darting;
  /// Iterations after burn-in. The loop runs burnIn + iterations steps.
  std::size_t iterations = 1000;
  /// Attempt a jump when u1 < pCheck instead of when u1 >= pCheck.
  bool invertPCheck = false;
  StateSpace space = StateSpace::Grasp;

  void validate() const;
};

struct Tallies {
  std::size_t success = 0;
  std::size_t slipped = 0;
  std::size_t collision = 0;
  std::size_t miss = 0;

  std::size_t total() const noexcept { return success + slipped + collision + miss; }
  void add(OutcomeKind kind) noexcept;
  bool operator==(const Tallies&) const = default;
};

struct RunStatistics {
  std::size_t localSteps = 0;
  std::size_t localAccepted = 0;
  std::size_t jumpAttempts = 0;
  std::size_t jumpsAccepted = 0;
  /// Jump checks that found the state outside every region and fell back to a
  /// local step.
  std::size_t jumpFallbacks = 0;
};

struct LearnedModel {
  /// Inherited proposals / seeded states come from the sketch or the reused
  /// chain; steps are this run's iterations.
  ChainHistory chain;
  std::vector<Vector> modes;
  std::vector<JumpRegion> regions;
  Matrix regionCovariance;
  std::string object;
  LearningParams params;
  std::uint64_t seed = 0;
  RunStatistics stats;
  /// Target density of each mode on `object`.
  std::vector<double> modeDensities;
};

/// Rough sketch + demonstrations -> combined Kameleon / darting run.
/// Throws InvalidDemonstration if a demonstration has zero density.
LearnedModel activeLearn(const TargetDensity& target, const RoughSketch& sketch, const std::vector<Vector>& demonstrations,
                         const LearningParams& params, Rng& rng, std::string objectName = {});

enum class ModeSource { SimilarObjectModes, ActualObjectModes };

/// Reuses the source model's chain as Kameleon history and its covariance for
/// the jump regions; no sketch is built. Only `target` (the novel object) is
/// evaluated. Modes with zero density on the novel object stay region centres.
LearnedModel transferLearn(const TargetDensity& target, const LearnedModel& source, ModeSource modeSource,
                           const std::vector<Vector>& actualModes, const LearningParams& params, Rng& rng,
                           std::string objectName = {});

/// Outcome counts over this run's evaluated proposals, burn-in included.
Tallies tallyOutcomes(const LearnedModel& model);
Tallies tallyOutcomes(const std::vector<ProposalRecord>& proposals);

}  // namespace graspmc
