#include "graspmc/darting.hpp"

#include <cmath>
#include <numbers>

#include "graspmc/error.hpp"

namespace graspmc {

void DartingConfig::validate() const {
  if (!(pCheck >= 0.0 && pCheck <= 1.0)) throw Error(ErrorCode::InvalidArgument, "DartingConfig: pCheck outside [0,1]");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "DartingConfig: epsilon must be > 0");
  if (!(scaleFloor > 0.0)) throw Error(ErrorCode::InvalidArgument, "DartingConfig: scaleFloor must be > 0");
}

Vector JumpRegion::semiAxes() const {
  return epsilon * (sqrtScales ? Vector(scales.cwiseSqrt()) : scales);
}

double ellipsoidVolume(const Vector& semiAxes) {
  const double d = static_cast<double>(semiAxes.size());
  // Log space keeps the product finite for 7D regions with tiny floors.
  double logV = 0.5 * d * std::log(std::numbers::pi) - std::lgamma(1.0 + 0.5 * d);
  for (Eigen::Index i = 0; i < semiAxes.size(); ++i) logV += std::log(semiAxes(i));
  return std::exp(logV);
}

JumpRegion buildJumpRegion(const Vector& mode, const Matrix& chainCovariance, double epsilon, double scaleFloor,
                           bool sqrtScales) {
  if (chainCovariance.rows() != mode.size()) {
    throw Error(ErrorCode::InvalidArgument, "buildJumpRegion: covariance / mode dimension mismatch");
  }
  if (!(epsilon > 0.0) || !(scaleFloor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "buildJumpRegion: epsilon and scaleFloor must be positive");
  }
  const SymmetricDecomposition dec = svdSymmetric(chainCovariance);
  JumpRegion r;
  r.center = mode;
  r.rotation = dec.rotation;
  r.scales = dec.values.cwiseMax(scaleFloor);
  r.epsilon = epsilon;
  r.sqrtScales = sqrtScales;
  r.volume = ellipsoidVolume(r.semiAxes());
  return r;
}

JumpRegion buildJumpRegion(const Vector& mode, const Matrix& chainCovariance, const DartingConfig& config) {
  return buildJumpRegion(mode, chainCovariance, config.epsilon, config.scaleFloor, config.sqrtScales);
}

bool containsState(const JumpRegion& region, const Vector& x) {
  const Vector local = region.rotation.transpose() * (x - region.center);
  const Vector axes = region.semiAxes();
  return local.cwiseQuotient(axes).squaredNorm() <= 1.0;
}

std::size_t countContaining(std::span<const JumpRegion> regions, const Vector& x) {
  std::size_t n = 0;
  for (const auto& r : regions) n += containsState(r, x) ? 1 : 0;
  return n;
}

std::size_t selectJumpTarget(std::span<const JumpRegion> regions, std::size_t /*currentIndex*/, Rng& rng) {
  if (regions.empty()) throw Error(ErrorCode::NoRegions, "selectJumpTarget: no jump regions");
  double total = 0.0;
  for (const auto& r : regions) {
    if (!(r.volume > 0.0)) throw Error(ErrorCode::InvalidArgument, "selectJumpTarget: non-positive region volume");
    total += r.volume;
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    acc += regions[i].volume;
    if (u < acc) return i;
  }
  return regions.size() - 1;
}

Vector jumpTransform(const Vector& x, const JumpRegion& from, const JumpRegion& to) {
  const Vector whitened = (from.rotation.transpose() * (x - from.center)).cwiseQuotient(from.scales.cwiseSqrt());
  return to.center - to.rotation * (to.scales.cwiseSqrt().cwiseProduct(whitened));
}

DartingStepResult dartingStep(const Vector& current, double currentDensity, std::span<const JumpRegion> regions,
                              const TargetDensity& target, const DartingConfig& config, StateSpace space, Rng& rng) {
  DartingStepResult out;
  out.next = current;
  out.nextDensity = currentDensity;

  std::vector<std::size_t> containing;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (containsState(regions[i], current)) containing.push_back(i);
  }
  if (containing.empty()) return out;

  const std::size_t from = containing[rng.index(containing.size())];
  const std::size_t to = selectJumpTarget(regions, from, rng);
  Vector proposal = jumpTransform(current, regions[from], regions[to]);
  projectToStateSpace(proposal, space);
  const Evaluation eval = target.evaluate(proposal);
  const double u = rng.uniform();

  const double nCurrent = static_cast<double>(containing.size());
  const double nProposal = static_cast<double>(countContaining(regions, proposal));

  bool accept = false;
  if (eval.density > 0.0 && nProposal > 0.0) {
    if (config.invertedAcceptance) {
      const double p = currentDensity > 0.0
                           ? std::min(1.0, (nCurrent * currentDensity) / (nProposal * eval.density))
                           : 0.0;
      accept = u > p;
    } else if (!(currentDensity > 0.0)) {
      accept = true;
    } else {
      const double ratio = (nCurrent * eval.density) / (nProposal * currentDensity);
      accept = u < std::min(1.0, ratio);
    }
  }

  out.proposal = proposal;
  out.proposalEvaluation = eval;
  out.outcome = accept ? DartOutcome::Accepted : DartOutcome::Rejected;
  if (accept) {
    out.next = std::move(proposal);
    out.nextDensity = eval.density;
  }
  return out;
}

}  // namespace graspmc
