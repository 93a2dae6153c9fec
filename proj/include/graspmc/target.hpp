#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string_view>

#include "graspmc/linalg.hpp"

namespace graspmc {

enum class OutcomeKind : std::uint8_t { Success = 0, Slipped = 1, Collision = 2, Miss = 3 };

std::string_view outcomeName(OutcomeKind kind) noexcept;
OutcomeKind outcomeFromName(std::string_view name);

struct Evaluation {
  double density = 0.0;
  OutcomeKind outcome = OutcomeKind::Miss;
};

/// Unnormalised target density. Implementations must return a finite,
/// nonnegative density; the outcome label is carried along for tallying.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;
  virtual Eigen::Index dimension() const = 0;
  virtual Evaluation evaluate(const Vector& state) const = 0;

  double density(const Vector& state) const { return evaluate(state).density; }
};

/// Adapts a plain density function. Positive density is labelled Success and
/// zero density Miss.
class FunctionTarget final : public TargetDensity {
 public:
  FunctionTarget(Eigen::Index dimension, std::function<double(const Vector&)> fn)
      : dimension_(dimension), fn_(std::move(fn)) {}

  Eigen::Index dimension() const override { return dimension_; }
  Evaluation evaluate(const Vector& state) const override;

  std::uint64_t evaluations() const noexcept { return evaluations_.load(); }

 private:
  Eigen::Index dimension_;
  std::function<double(const Vector&)> fn_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

/// Euclidean states are used as-is. Grasp states are (x, y, z, qw, qx, qy, qz)
/// and have their quaternion block renormalised and canonicalised after every
/// proposal.
enum class StateSpace : std::uint8_t { Euclidean = 0, Grasp = 1 };

void projectToStateSpace(Vector& state, StateSpace space);

}  // namespace graspmc
