#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "graspmc/rng.hpp"

namespace graspmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTolerance = 1e-10;

/// Throws NonSymmetricCovariance unless max|A - A^T| <= 1e-10 * max(1, max|A|).
void requireSymmetric(const Matrix& m, const char* where);

/// Eigendecomposition of a symmetric matrix, m = U diag(values) U^T.
/// Eigenvalues are clamped at zero and sorted in descending order.
struct SymmetricDecomposition {
  Matrix rotation;
  Vector values;
};

SymmetricDecomposition svdSymmetric(const Matrix& m);

/// Square-root factor L with L L^T = covariance.
///
/// A plain Cholesky is tried first. Positive semi-definite inputs that fail it
/// get a pivoted LDL^T factor, which keeps null directions exactly null. Only
/// if that also fails is the diagonal jittered by 1e-12 * trace / d, escalated
/// by 10x up to three times.
class GaussianFactor {
 public:
  explicit GaussianFactor(const Matrix& covariance);

  const Matrix& lower() const noexcept { return lower_; }
  Eigen::Index dimension() const noexcept { return lower_.rows(); }
  /// True when the factor is a lower-triangular Cholesky factor of a
  /// positive-definite matrix, the precondition for logDensity.
  bool fullRank() const noexcept { return fullRank_; }

  /// log N(x; mean, covariance). Requires fullRank().
  double logDensity(const Vector& x, const Vector& mean) const;

 private:
  Matrix lower_;
  bool fullRank_ = false;
  double logDet_ = 0.0;
};

Vector sampleGaussian(const Vector& mean, const GaussianFactor& factor, Rng& rng);
Vector sampleGaussian(const Vector& mean, const Matrix& covariance, Rng& rng);

/// Unbiased sample covariance of a set of equally sized vectors.
Matrix sampleCovariance(std::span<const Vector> samples);

}  // namespace graspmc
