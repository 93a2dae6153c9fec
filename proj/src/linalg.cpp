#include "graspmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "graspmc/error.hpp"

namespace graspmc {

void requireSymmetric(const Matrix& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSymmetricCovariance, std::string(where) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTolerance * scale)) {
    throw Error(ErrorCode::NonSymmetricCovariance,
                std::string(where) + ": matrix not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
}

SymmetricDecomposition svdSymmetric(const Matrix& m) {
  requireSymmetric(m, "svdSymmetric");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DecompositionFailure, "svdSymmetric: eigensolver did not converge");
  }
  const Eigen::Index d = m.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return raw(a) > raw(b); });

  SymmetricDecomposition out{Matrix(d, d), Vector(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = std::max(0.0, raw(src));
    out.rotation.col(i) = solver.eigenvectors().col(src);
  }
  return out;
}

namespace {

bool choleskyInto(const Matrix& a, Matrix& lower, double& logDet) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) return false;
  }
  logDet = 2.0 * lower.diagonal().array().log().sum();
  return true;
}

// Semidefinite square root via pivoted LDL^T: A = P^T L D L^T P.
bool semidefiniteInto(const Matrix& a, Matrix& factor) {
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) return false;
  const Vector d = ldlt.vectorD();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((d.array() < -kSymmetryTolerance * scale).any()) return false;
  const Matrix l = ldlt.matrixL();
  const Vector root = d.cwiseMax(0.0).cwiseSqrt();
  factor = ldlt.transpositionsP().transpose() * (l * root.asDiagonal());
  return factor.allFinite();
}

}  // namespace

GaussianFactor::GaussianFactor(const Matrix& covariance) {
  requireSymmetric(covariance, "GaussianFactor");
  const Matrix a = 0.5 * (covariance + covariance.transpose());
  if (choleskyInto(a, lower_, logDet_)) {
    fullRank_ = true;
    return;
  }
  if (semidefiniteInto(a, lower_)) return;

  const Eigen::Index d = a.rows();
  double jitter = 1e-12 * a.trace() / static_cast<double>(d);
  for (int attempt = 0; attempt < 3 && jitter > 0.0; ++attempt, jitter *= 10.0) {
    Matrix jittered = a;
    jittered.diagonal().array() += jitter;
    if (choleskyInto(jittered, lower_, logDet_)) {
      fullRank_ = true;
      return;
    }
  }
  throw Error(ErrorCode::DecompositionFailure, "GaussianFactor: covariance could not be factorised");
}

double GaussianFactor::logDensity(const Vector& x, const Vector& mean) const {
  if (!fullRank_) {
    throw Error(ErrorCode::DecompositionFailure, "GaussianFactor::logDensity: singular covariance");
  }
  const Vector diff = x - mean;
  const Vector whitened = lower_.triangularView<Eigen::Lower>().solve(diff);
  const double d = static_cast<double>(lower_.rows());
  return -0.5 * whitened.squaredNorm() - 0.5 * logDet_ - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

Vector sampleGaussian(const Vector& mean, const GaussianFactor& factor, Rng& rng) {
  const Eigen::Index d = factor.dimension();
  if (mean.size() != d) throw Error(ErrorCode::InvalidArgument, "sampleGaussian: dimension mismatch");
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  return mean + factor.lower() * z;
}

Vector sampleGaussian(const Vector& mean, const Matrix& covariance, Rng& rng) {
  return sampleGaussian(mean, GaussianFactor(covariance), rng);
}

Matrix sampleCovariance(std::span<const Vector> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyHistory, "sampleCovariance: no samples");
  const Eigen::Index d = samples.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  Matrix cov = Matrix::Zero(d, d);
  if (samples.size() < 2) return cov;
  for (const auto& s : samples) {
    const Vector c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
  return 0.5 * (cov + cov.transpose());
}

}  // namespace graspmc
