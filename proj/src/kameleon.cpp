#include "graspmc/kameleon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graspmc/error.hpp"

namespace graspmc {

GaussianKernel::GaussianKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error(ErrorCode::InvalidArgument, "GaussianKernel: bandwidth must be positive");
  }
}

double GaussianKernel::operator()(const Vector& x, const Vector& y) const {
  return std::exp(-(x - y).squaredNorm() / (2.0 * bandwidth_ * bandwidth_));
}

Vector GaussianKernel::gradient(const Vector& y, const Vector& z) const {
  const double s2 = bandwidth_ * bandwidth_;
  return -(y - z) / s2 * (*this)(y, z);
}

double medianBandwidth(std::span<const Vector> points, double floor) {
  std::vector<double> dist;
  dist.reserve(points.size() * (points.size() > 0 ? points.size() - 1 : 0) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      // Repeated chain states (rejections) carry no scale information.
      const double d = (points[i] - points[j]).norm();
      if (d > 0.0) dist.push_back(d);
    }
  }
  if (dist.empty()) return std::max(floor, 1.0);
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double median = *mid;
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), mid);
    median = 0.5 * (median + lower);
  }
  return std::max(floor, median);
}

// ---------------------------------------------------------------- history

void ChainHistory::seedState(Vector state, double density) {
  if (!(density >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ChainHistory: negative density");
  if (steps() != 0) throw Error(ErrorCode::InvalidArgument, "ChainHistory: seed states must precede steps");
  states_.push_back(std::move(state));
  densities_.push_back(density);
  ++seeded_;
}

void ChainHistory::inheritProposal(ProposalRecord proposal) {
  if (!(proposal.density >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ChainHistory: negative density");
  if (steps() != 0) throw Error(ErrorCode::InvalidArgument, "ChainHistory: inherited proposals must precede steps");
  proposals_.push_back(std::move(proposal));
  ++inherited_;
}

void ChainHistory::recordStep(ProposalRecord proposal, Vector nextState, double nextDensity) {
  if (!(proposal.density >= 0.0) || !(nextDensity >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ChainHistory: negative density");
  }
  proposals_.push_back(std::move(proposal));
  states_.push_back(std::move(nextState));
  densities_.push_back(nextDensity);
}

std::vector<bool> ChainHistory::acceptedFlags() const {
  std::vector<bool> flags;
  flags.reserve(steps());
  for (std::size_t i = inherited_; i < proposals_.size(); ++i) flags.push_back(proposals_[i].accepted);
  return flags;
}

std::size_t ChainHistory::poolSize() const noexcept {
  return pool_ == Pool::States ? states_.size() : proposals_.size() + seeded_;
}

const Vector& ChainHistory::poolEntry(std::size_t i) const {
  if (pool_ == Pool::States) return states_.at(i);
  if (i < proposals_.size()) return proposals_[i].state;
  return states_.at(i - proposals_.size());
}

std::vector<Vector> ChainHistory::poolStates() const {
  std::vector<Vector> out;
  out.reserve(poolSize());
  for (std::size_t i = 0; i < poolSize(); ++i) out.push_back(poolEntry(i));
  return out;
}

// ---------------------------------------------------------------- proposal

void KameleonConfig::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "KameleonConfig: gamma must be > 0");
  if (!(nu >= 0.0)) throw Error(ErrorCode::InvalidArgument, "KameleonConfig: nu must be >= 0");
  if (subsampleSize == 0) throw Error(ErrorCode::InvalidArgument, "KameleonConfig: subsample size must be > 0");
  if (bandwidth && !(*bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "KameleonConfig: bandwidth must be > 0");
  if (!(bandwidthFloor > 0.0)) throw Error(ErrorCode::InvalidArgument, "KameleonConfig: bandwidth floor must be > 0");
}

std::vector<Vector> subsampleHistory(const ChainHistory& history, std::size_t n, Rng& rng) {
  const std::size_t size = history.poolSize();
  if (size == 0) throw Error(ErrorCode::EmptyHistory, "subsampleHistory: history is empty");
  const std::size_t take = std::min(n, size);
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `take` slots end up a uniform subset.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.index(size - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Vector> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(history.poolEntry(idx[i]));
  return out;
}

Matrix kernelGradientMatrix(std::span<const Vector> z, const Vector& y, const GaussianKernel& kernel) {
  Matrix m(y.size(), static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = 2.0 * kernel.gradient(y, z[i]);
  return m;
}

Matrix proposalCovariance(const Matrix& gradients, double gamma, double nu) {
  const Eigen::Index d = gradients.rows();
  Matrix cov = Matrix::Identity(d, d) * (gamma * gamma);
  if (nu == 0.0 || gradients.cols() == 0) return cov;
  // M H M^T = (M H)(M H)^T since H is symmetric and idempotent.
  const Vector colMean = gradients.rowwise().mean();
  const Matrix centred = gradients.colwise() - colMean;
  cov.noalias() += (nu * nu) * (centred * centred.transpose());
  return 0.5 * (cov + cov.transpose());
}

Matrix proposalCovariance(const Matrix& gradients, const KameleonConfig& config) {
  return proposalCovariance(gradients, config.gamma, config.nu);
}

bool adaptationSchedule(std::size_t iteration, const KameleonConfig& config) noexcept {
  return iteration < config.burnInIterations;
}

bool metropolisDecision(double currentDensity, double proposalDensity, double logCorrection, double u) {
  if (!(proposalDensity > 0.0)) return false;
  if (!(currentDensity > 0.0)) return true;
  const double logRatio = (std::log(proposalDensity) - std::log(currentDensity)) + logCorrection;
  return u < std::exp(std::min(0.0, logRatio));
}

// ---------------------------------------------------------------- sampler

KameleonSampler::KameleonSampler(KameleonConfig config, StateSpace space) : config_(std::move(config)), space_(space) {
  config_.validate();
}

void KameleonSampler::adapt(const ChainHistory& history, Rng& rng) {
  if (config_.nu == 0.0) return;
  subsample_ = subsampleHistory(history, config_.subsampleSize, rng);
  const double bw = config_.bandwidth ? *config_.bandwidth : medianBandwidth(subsample_, config_.bandwidthFloor);
  kernel_ = GaussianKernel(bw);
  adapted_ = true;
}

Matrix KameleonSampler::covarianceAt(const Vector& x) const {
  if (config_.nu == 0.0 || subsample_.empty()) {
    return Matrix::Identity(x.size(), x.size()) * (config_.gamma * config_.gamma);
  }
  return proposalCovariance(kernelGradientMatrix(subsample_, x, kernel_), config_);
}

double KameleonSampler::logProposal(const Vector& to, const Vector& from) const {
  return GaussianFactor(covarianceAt(from)).logDensity(to, from);
}

KameleonStepResult KameleonSampler::step(const Vector& current, double currentDensity, const TargetDensity& target,
                                         ChainHistory& history, Rng& rng) const {
  if (!(currentDensity >= 0.0) || !std::isfinite(currentDensity)) {
    throw Error(ErrorCode::ZeroCurrentDensity, "kameleonStep: current density must be finite and >= 0");
  }
  const GaussianFactor forward(covarianceAt(current));
  Vector proposal = sampleGaussian(current, forward, rng);
  projectToStateSpace(proposal, space_);

  const Evaluation eval = target.evaluate(proposal);
  const double u = rng.uniform();

  bool accepted = false;
  if (eval.density > 0.0) {
    double logCorrection = 0.0;
    if (currentDensity > 0.0) {
      const double logForward = forward.logDensity(proposal, current);
      const double logReverse = logProposal(current, proposal);
      logCorrection = logReverse - logForward;
    }
    accepted = metropolisDecision(currentDensity, eval.density, logCorrection, u);
  }

  KameleonStepResult out;
  out.accepted = accepted;
  out.proposal = proposal;
  out.proposalEvaluation = eval;
  out.next = accepted ? proposal : current;
  out.nextDensity = accepted ? eval.density : currentDensity;
  history.recordStep(ProposalRecord{proposal, eval.density, eval.outcome, accepted, false}, out.next, out.nextDensity);
  return out;
}

KameleonStepResult kameleonStep(const Vector& current, double currentDensity, const TargetDensity& target,
                                ChainHistory& history, const KameleonConfig& config, StateSpace space, Rng& rng) {
  KameleonSampler sampler(config, space);
  sampler.adapt(history, rng);
  return sampler.step(current, currentDensity, target, history, rng);
}

}  // namespace graspmc
