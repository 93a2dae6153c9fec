#pragma once

#include "graspmc/linalg.hpp"
#include "graspmc/rng.hpp"

namespace graspmc {

/// von Mises-Fisher law on the unit sphere S^{p-1}, density proportional to
/// exp(kappa * mean^T x). Supported dimensions are p = 3 and p = 4.
class VonMisesFisher {
 public:
  VonMisesFisher(Vector meanDirection, double kappa);

  const Vector& meanDirection() const noexcept { return mean_; }
  double kappa() const noexcept { return kappa_; }
  Eigen::Index dimension() const noexcept { return mean_.size(); }

  /// Wood's rejection sampler for w = mean^T x, then a uniform direction in the
  /// tangent space of the mean. The normalising constant is never evaluated.
  Vector sample(Rng& rng) const;

 private:
  Vector mean_;
  double kappa_;
};

Vector sampleVonMisesFisher(const VonMisesFisher& dist, Rng& rng);

}  // namespace graspmc
