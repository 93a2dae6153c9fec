#pragma once

#include <cmath>
#include <vector>

#include "graspmc/linalg.hpp"
#include "graspmc/rng.hpp"
#include "graspmc/target.hpp"

namespace graspmc::testing {

/// I_nu(x) by its power series, summed in log space.
inline double besselI(double nu, double x) {
  double sum = 0.0;
  for (int k = 0; k < 300; ++k) {
    sum += std::exp((2.0 * k + nu) * std::log(0.5 * x) - std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0));
  }
  return sum;
}

/// Mean resultant length of vMF on S^{p-1}: I_{p/2}(k) / I_{p/2-1}(k).
inline double besselRatio(int p, double kappa) { return besselI(p / 2.0, kappa) / besselI(p / 2.0 - 1.0, kappa); }

/// Equal-weight isotropic Gaussian mixture, unnormalised.
inline double mixtureDensity(const Vector& x, const std::vector<Vector>& centers, double sigma) {
  double v = 0.0;
  for (const auto& c : centers) v += std::exp(-0.5 * (x - c).squaredNorm() / (sigma * sigma));
  return v;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Matrix randomPsd(Eigen::Index d, Rng& rng, Eigen::Index rank = -1) {
  if (rank < 0) rank = d;
  Matrix a(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = rng.normal();
  Matrix m = a * a.transpose();
  return 0.5 * (m + m.transpose());
}

}  // namespace graspmc::testing
