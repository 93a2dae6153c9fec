#include "graspmc/rng.hpp"

#include "graspmc/error.hpp"

namespace graspmc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double Rng::uniform() { return unit_(engine_); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Rng::index: empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Rng Rng::split() { return Rng(splitmix64(engine_())); }

}  // namespace graspmc
