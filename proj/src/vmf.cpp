#include "graspmc/vmf.hpp"

#include <cmath>
#include <string>

#include "graspmc/error.hpp"

namespace graspmc {

VonMisesFisher::VonMisesFisher(Vector meanDirection, double kappa) : mean_(std::move(meanDirection)), kappa_(kappa) {
  const auto p = mean_.size();
  if (p != 3 && p != 4) {
    throw Error(ErrorCode::InvalidArgument, "VonMisesFisher: dimension must be 3 or 4, got " + std::to_string(p));
  }
  if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) {
    throw Error(ErrorCode::InvalidArgument, "VonMisesFisher: kappa must be finite and >= 0");
  }
  const double norm = mean_.norm();
  if (!(norm > 1e-12)) throw Error(ErrorCode::InvalidArgument, "VonMisesFisher: zero mean direction");
  if (std::abs(norm - 1.0) > 1e-9) mean_ /= norm;
}

namespace {

double sampleCosine(double kappa, double dim, Rng& rng) {
  const double m1 = dim - 1.0;
  if (kappa == 0.0) {
    const double a = rng.gamma(0.5 * m1);
    const double b = rng.gamma(0.5 * m1);
    return 1.0 - 2.0 * a / (a + b);
  }
  // b written in the cancellation-free form m1 / (2k + sqrt(4k^2 + m1^2)).
  const double b = m1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m1 * m1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + m1 * std::log(1.0 - x0 * x0);
  for (;;) {
    const double ga = rng.gamma(0.5 * m1);
    const double gb = rng.gamma(0.5 * m1);
    const double z = ga / (ga + gb);
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = rng.uniform();
    if (kappa * w + m1 * std::log(1.0 - x0 * w) - c >= std::log(u)) return w;
  }
}

}  // namespace

Vector VonMisesFisher::sample(Rng& rng) const {
  const Eigen::Index p = mean_.size();
  const double w = sampleCosine(kappa_, static_cast<double>(p), rng);

  Vector tangent(p);
  double tnorm = 0.0;
  do {
    for (Eigen::Index i = 0; i < p; ++i) tangent(i) = rng.normal();
    tangent -= tangent.dot(mean_) * mean_;
    tnorm = tangent.norm();
  } while (!(tnorm > 1e-12));
  tangent /= tnorm;

  const double radial = std::sqrt(std::max(0.0, 1.0 - w * w));
  Vector out = w * mean_ + radial * tangent;
  return out / out.norm();
}

Vector sampleVonMisesFisher(const VonMisesFisher& dist, Rng& rng) { return dist.sample(rng); }

}  // namespace graspmc
