#include "graspmc/target.hpp"

#include <cmath>
#include <string>

#include "graspmc/error.hpp"
#include "graspmc/quaternion.hpp"

namespace graspmc {

std::string_view outcomeName(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::Success: return "success";
    case OutcomeKind::Slipped: return "slipped";
    case OutcomeKind::Collision: return "collision";
    case OutcomeKind::Miss: return "miss";
  }
  return "miss";
}

OutcomeKind outcomeFromName(std::string_view name) {
  if (name == "success") return OutcomeKind::Success;
  if (name == "slipped") return OutcomeKind::Slipped;
  if (name == "collision") return OutcomeKind::Collision;
  if (name == "miss") return OutcomeKind::Miss;
  throw Error(ErrorCode::ParseError, "unknown outcome '" + std::string(name) + "'");
}

Evaluation FunctionTarget::evaluate(const Vector& state) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  double d = fn_(state);
  if (!std::isfinite(d) || d < 0.0) d = 0.0;
  return {d, d > 0.0 ? OutcomeKind::Success : OutcomeKind::Miss};
}

void projectToStateSpace(Vector& state, StateSpace space) {
  if (space != StateSpace::Grasp) return;
  if (state.size() != 7) throw Error(ErrorCode::InvalidArgument, "grasp state must have 7 components");
  canonicalizeQuaternionBlock(state, 3);
}

}  // namespace graspmc
