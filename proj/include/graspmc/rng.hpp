#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace graspmc {

/// Seedable generator handed explicitly to every sampling routine. There is no
/// global generator anywhere in the library; two Rng objects built from the
/// same seed produce the same stream on a given platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double gamma(double shape);
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Derives an independent child generator. The child seed is a splitmix64
  /// step of this generator's next output, so splitting is itself reproducible.
  Rng split();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace graspmc
