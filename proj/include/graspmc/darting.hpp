#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graspmc/linalg.hpp"
#include "graspmc/rng.hpp"
#include "graspmc/target.hpp"

namespace graspmc {

struct DartingConfig {
  /// Probability of staying with the local sampler on a given iteration.
  double pCheck = 0.6;
  double epsilon = 0.7;
  double scaleFloor = 1e-6;
  /// Use the min[1, n(x)pi(x) / (n(x')pi(x'))] ratio with the "accept when
  /// u > P" comparison instead of the detailed-balance form.
  bool invertedAcceptance = false;
  /// Semi-axes epsilon * sqrt(lambda) instead of epsilon * lambda.
  bool sqrtScales = false;

  void validate() const;
};

/// Ellipsoid around a mode. Axes are the columns of `rotation`; along axis i
/// the semi-axis length is epsilon * lambda_i (or epsilon * sqrt(lambda_i)).
struct JumpRegion {
  Vector center;
  Matrix rotation;
  /// Eigenvalues of the chain covariance, descending, floored.
  Vector scales;
  double epsilon = 1.0;
  bool sqrtScales = false;
  /// pi^{d/2} prod(semi-axes) / Gamma(1 + d/2).
  double volume = 0.0;

  Eigen::Index dimension() const noexcept { return center.size(); }
  Vector semiAxes() const;
};

/// Volume of a d-ball scaled by the given semi-axes.
double ellipsoidVolume(const Vector& semiAxes);

JumpRegion buildJumpRegion(const Vector& mode, const Matrix& chainCovariance, const DartingConfig& config);
JumpRegion buildJumpRegion(const Vector& mode, const Matrix& chainCovariance, double epsilon,
                           double scaleFloor = 1e-6, bool sqrtScales = false);

bool containsState(const JumpRegion& region, const Vector& x);
/// n(x): number of regions containing x.
std::size_t countContaining(std::span<const JumpRegion> regions, const Vector& x);

/// Index i drawn with probability V_i / sum_j V_j. `currentIndex` is accepted
/// for interface symmetry; self-selection is allowed.
std::size_t selectJumpTarget(std::span<const JumpRegion> regions, std::size_t currentIndex, Rng& rng);

/// x' = mu_to - U_to S_to^{1/2} S_from^{-1/2} U_from^T (x - mu_from).
Vector jumpTransform(const Vector& x, const JumpRegion& from, const JumpRegion& to);

enum class DartOutcome { NotInRegion, Accepted, Rejected };

struct DartingStepResult {
  Vector next;
  double nextDensity = 0.0;
  DartOutcome outcome = DartOutcome::NotInRegion;
  /// Only meaningful when a jump was proposed.
  Vector proposal;
  Evaluation proposalEvaluation;

  bool jumped() const noexcept { return outcome == DartOutcome::Accepted; }
  bool attempted() const noexcept { return outcome != DartOutcome::NotInRegion; }
};

/// One darting move. Outside every region the state is returned unchanged and
/// no random numbers are consumed. Inside, the source region is chosen
/// uniformly among the containing ones, the target by volume, and the jump is
/// accepted with min[1, n(x) pi(x') / (n(x') pi(x))].
DartingStepResult dartingStep(const Vector& current, double currentDensity, std::span<const JumpRegion> regions,
                              const TargetDensity& target, const DartingConfig& config, StateSpace space, Rng& rng);

}  // namespace graspmc
