#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graspmc/grasp/sdf.hpp"
#include "graspmc/linalg.hpp"
#include "graspmc/quaternion.hpp"
#include "graspmc/rng.hpp"
#include "graspmc/target.hpp"

namespace graspmc::grasp {

/// Gripper pose in the object's canonical frame. `position` is the palm
/// centre; the fingers extend along the approach axis.
struct Grasp {
  Vec3 position = Vec3::Zero();
  UnitQuaternion orientation;

  /// (x, y, z, qw, qx, qy, qz).
  Vector toState() const;
  /// Canonicalises the quaternion block. Throws ZeroQuaternion.
  static Grasp fromState(const Vector& state);
};

struct ObjectModel {
  std::string name;
  SdfNode shape;
  Aabb bounds;

  /// Bounds are derived from the shape tree.
  ObjectModel(std::string name, SdfNode shape);

  double sdf(const Vec3& p) const { return shape.distance(p); }
};

/// Parallel-jaw gripper, all lengths in metres. In the gripper frame the palm
/// centre is the origin, the fingers extend along `approachAxis` (+z) and the
/// jaws close along `closingAxis` (+x).
struct GripperModel {
  double jawSpan = 0.08;
  double fingerLength = 0.05;
  double fingerWidth = 0.01;
  double palmDepth = 0.02;
  Vec3 approachAxis = Vec3::UnitZ();
  Vec3 closingAxis = Vec3::UnitX();

  void validate() const;
  /// Distance from the palm to the line the finger pads close along.
  double contactDepth() const { return 0.8 * fingerLength; }
  Vec3 lateralAxis() const { return approachAxis.cross(closingAxis); }
};

struct EvaluationParams {
  double frictionCoefficient = 0.5;
  double slipThreshold = 0.05;
  double probePitch = 0.005;
  double collisionTolerance = 1e-4;
  /// Minimum step of the jaw march.
  double contactTolerance = 1e-5;
  /// Bisection width for the contact point once bracketed.
  double contactRefinement = 1e-11;
  double normalStep = 1e-5;

  void validate() const;
};

struct GraspOutcome {
  OutcomeKind kind = OutcomeKind::Miss;
  double quality = 0.0;
};

/// An object placed in the world by a rigid transform. Identity pose is the
/// canonical frame.
struct PosedObject {
  const ObjectModel* model = nullptr;
  RigidTransform pose;

  double sdf(const Vec3& world) const { return model->sdf(pose.applyInverse(world)); }
  /// Central-difference sdf gradient (object-frame stencil) in world coordinates, normalised.
  Vec3 normal(const Vec3& world, double step) const;
  /// Grasps whose palm lies outside this box (object frame) are misses.
  Aabb workspace(const GripperModel& gripper) const;
};

Aabb workspaceBox(const ObjectModel& object, const GripperModel& gripper);

/// Probe points of the open gripper (palm + both fingers) in the gripper frame.
std::vector<Vec3> gripperProbeLattice(const GripperModel& gripper, double pitch);

/// Deterministic classification cascade: workspace check, collision probes,
/// jaw closing, contact normals, quality.
///
/// quality = max(0, -n1.n2) * min_i max(0, (cos t_i - cos t_f) / (1 - cos t_f))
/// where t_i is the angle between contact normal i and the closing axis and
/// t_f = atan(friction). Slipped when quality <= slipThreshold.
GraspOutcome evaluateGrasp(const Grasp& g, const PosedObject& object, const GripperModel& gripper,
                           const EvaluationParams& params = {});
GraspOutcome evaluateGrasp(const Grasp& g, const ObjectModel& object, const GripperModel& gripper,
                           const EvaluationParams& params = {});

double targetDensity(const Grasp& g, const ObjectModel& object, const GripperModel& gripper,
                     const EvaluationParams& params = {});

/// Grasp density on one object as a TargetDensity over 7D grasp states.
/// Counts evaluations so callers can check which objects were consulted.
class GraspTarget final : public TargetDensity {
 public:
  GraspTarget(const ObjectModel& object, GripperModel gripper, EvaluationParams params = {});

  Eigen::Index dimension() const override { return 7; }
  Evaluation evaluate(const Vector& state) const override;

  const ObjectModel& object() const noexcept { return *object_; }
  const GripperModel& gripper() const noexcept { return gripper_; }
  const EvaluationParams& params() const noexcept { return params_; }
  std::uint64_t evaluations() const noexcept { return evaluations_.load(); }

 private:
  const ObjectModel* object_;
  GripperModel gripper_;
  EvaluationParams params_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

/// Nine parametric objects: pitcher, pan, plate and two variants of each.
const std::vector<ObjectModel>& objectCatalog();
const ObjectModel& findObject(const std::vector<ObjectModel>& catalog, const std::string& name);

/// Rejection sample of a point with |sdf| < shell inside the object's bounds.
Vec3 sampleSurfacePoint(const ObjectModel& object, Rng& rng, double shell = 1e-3, std::size_t maxTries = 1000000);

struct DemonstrationParams {
  std::size_t maxAttempts = 10000;
  std::size_t trialsPerAttempt = 200;
  std::size_t restarts = 4;
  double perturbationKappa = 200.0;
};

struct Demonstration {
  Grasp grasp;
  double quality = 0.0;
};

/// Surface-point demonstrations: sample a surface point, point the gripper
/// along the inward normal, then hill-climb over orientation about the grasp
/// centre. Throws DemonstrationFailure when maxAttempts surface points yield
/// fewer than `count` successes.
std::vector<Demonstration> demonstrateGrasps(const ObjectModel& object, const GripperModel& gripper, std::size_t count,
                                             Rng& rng, const EvaluationParams& params = {},
                                             const DemonstrationParams& demo = {});

}  // namespace graspmc::grasp
