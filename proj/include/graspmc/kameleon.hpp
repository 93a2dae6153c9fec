#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "graspmc/linalg.hpp"
#include "graspmc/rng.hpp"
#include "graspmc/target.hpp"

namespace graspmc {

/// k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
class GaussianKernel {
 public:
  explicit GaussianKernel(double bandwidth);

  double bandwidth() const noexcept { return bandwidth_; }
  double operator()(const Vector& x, const Vector& y) const;
  /// grad_x k(x, z) evaluated at x = y, i.e. -(y - z) / sigma^2 * k(y, z).
  Vector gradient(const Vector& y, const Vector& z) const;

 private:
  double bandwidth_;
};

/// Median of pairwise Euclidean distances within `points`, floored at `floor`.
double medianBandwidth(std::span<const Vector> points, double floor = 1e-6);

struct ProposalRecord {
  Vector state;
  double density = 0.0;
  OutcomeKind outcome = OutcomeKind::Miss;
  bool accepted = false;
  bool jump = false;
};

/// Ordered record of a chain: visited states with their densities, and every
/// proposal generated along the way.
///
/// States come in two flavours: seeded states (inserted before sampling, e.g.
/// demonstrations) and step states, one per recorded proposal. Proposals come
/// in two flavours too: inherited ones (a rough sketch carries proposals with
/// no chain steps) and step proposals. The invariant is
///   states().size() - seededStates() == proposals().size() - inheritedProposals()
/// and the step state i belongs to step proposal i.
class ChainHistory {
 public:
  /// Which list adaptation subsamples from. A history built from a rough sketch
  /// draws from the proposals (plus seeded states); a regular chain draws from
  /// its visited states.
  enum class Pool : std::uint8_t { States = 0, Proposals = 1 };

  explicit ChainHistory(Pool pool = Pool::States) : pool_(pool) {}

  Pool pool() const noexcept { return pool_; }
  void setPool(Pool pool) noexcept { pool_ = pool; }

  void seedState(Vector state, double density);
  void inheritProposal(ProposalRecord proposal);
  void recordStep(ProposalRecord proposal, Vector nextState, double nextDensity);

  const std::vector<Vector>& states() const noexcept { return states_; }
  const std::vector<double>& densities() const noexcept { return densities_; }
  const std::vector<ProposalRecord>& proposals() const noexcept { return proposals_; }
  std::size_t seededStates() const noexcept { return seeded_; }
  std::size_t inheritedProposals() const noexcept { return inherited_; }
  std::size_t steps() const noexcept { return proposals_.size() - inherited_; }
  std::vector<bool> acceptedFlags() const;

  bool empty() const noexcept { return states_.empty() && proposals_.empty(); }
  std::size_t poolSize() const noexcept;
  const Vector& poolEntry(std::size_t i) const;
  std::vector<Vector> poolStates() const;

 private:
  Pool pool_;
  std::vector<Vector> states_;
  std::vector<double> densities_;
  std::vector<ProposalRecord> proposals_;
  std::size_t seeded_ = 0;
  std::size_t inherited_ = 0;
};

struct KameleonConfig {
  double gamma = 1e-4;
  double nu = 2.38 / std::sqrt(6.0);
  std::size_t subsampleSize = 100;
  std::size_t burnInIterations = 100;
  /// Fixed kernel bandwidth. When unset the median heuristic is applied to
  /// every fresh subsample.
  std::optional<double> bandwidth;
  double bandwidthFloor = 1e-6;

  void validate() const;
};

/// min(n, pool size) pool entries drawn uniformly without replacement.
std::vector<Vector> subsampleHistory(const ChainHistory& history, std::size_t n, Rng& rng);

/// d x n matrix whose column i is 2 * grad_x k(x, z_i) at x = y (step size 1).
Matrix kernelGradientMatrix(std::span<const Vector> z, const Vector& y, const GaussianKernel& kernel);

/// gamma^2 I + nu^2 M H M^T with H the n x n centring matrix.
Matrix proposalCovariance(const Matrix& gradients, double gamma, double nu);
Matrix proposalCovariance(const Matrix& gradients, const KameleonConfig& config);

/// True while the chain is still in burn-in and should re-adapt.
bool adaptationSchedule(std::size_t iteration, const KameleonConfig& config) noexcept;

struct KameleonStepResult {
  Vector next;
  double nextDensity = 0.0;
  bool accepted = false;
  Vector proposal;
  Evaluation proposalEvaluation;
};

/// Kernel-adaptive Metropolis-Hastings. Holds the adapted subsample and kernel;
/// the proposal covariance is recomputed at whichever point the proposal is
/// conditioned on, so the proposal is not symmetric and the MH ratio carries
/// both q terms.
class KameleonSampler {
 public:
  KameleonSampler(KameleonConfig config, StateSpace space);

  const KameleonConfig& config() const noexcept { return config_; }
  StateSpace space() const noexcept { return space_; }

  /// Draws a fresh subsample and bandwidth. A no-op when nu == 0, where the
  /// proposal does not depend on the history at all.
  void adapt(const ChainHistory& history, Rng& rng);
  bool adapted() const noexcept { return adapted_; }
  const std::vector<Vector>& subsample() const noexcept { return subsample_; }
  const GaussianKernel& kernel() const noexcept { return kernel_; }

  Matrix covarianceAt(const Vector& x) const;
  /// log q(to | from).
  double logProposal(const Vector& to, const Vector& from) const;

  /// One MH step. Draws the proposal, then exactly one uniform. The proposal
  /// is recorded in `history`.
  KameleonStepResult step(const Vector& current, double currentDensity, const TargetDensity& target,
                          ChainHistory& history, Rng& rng) const;

 private:
  KameleonConfig config_;
  StateSpace space_;
  std::vector<Vector> subsample_;
  GaussianKernel kernel_{1.0};
  bool adapted_ = false;
};

/// Stateless convenience: adapts on `history` (when nu > 0) and takes one step.
KameleonStepResult kameleonStep(const Vector& current, double currentDensity, const TargetDensity& target,
                                ChainHistory& history, const KameleonConfig& config, StateSpace space, Rng& rng);

/// Shared MH decision with the zero-density conventions used throughout:
/// a zero-density proposal is always rejected; from a zero-density state any
/// positive-density proposal is accepted; otherwise u < min(1, exp(logRatio)).
bool metropolisDecision(double currentDensity, double proposalDensity, double logCorrection, double u);

}  // namespace graspmc
