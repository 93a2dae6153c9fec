#include "graspmc/grasp/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "graspmc/error.hpp"
#include "graspmc/vmf.hpp"

namespace graspmc::grasp {

Vector Grasp::toState() const {
  Vector s(7);
  s << position.x(), position.y(), position.z(), orientation.w(), orientation.x(), orientation.y(), orientation.z();
  return s;
}

Grasp Grasp::fromState(const Vector& state) {
  if (state.size() != 7) throw Error(ErrorCode::InvalidArgument, "Grasp::fromState: expected 7 components");
  Grasp g;
  g.position = state.head<3>();
  g.orientation = UnitQuaternion::canonicalize(state(3), state(4), state(5), state(6));
  return g;
}

ObjectModel::ObjectModel(std::string n, SdfNode s) : name(std::move(n)), shape(std::move(s)), bounds(shape.bounds()) {}

void GripperModel::validate() const {
  if (!(jawSpan > 0.0 && fingerLength > 0.0 && fingerWidth > 0.0 && palmDepth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "GripperModel: dimensions must be positive");
  }
  if (std::abs(approachAxis.norm() - 1.0) > 1e-9 || std::abs(closingAxis.norm() - 1.0) > 1e-9 ||
      std::abs(approachAxis.dot(closingAxis)) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "GripperModel: axes must be orthonormal");
  }
}

void EvaluationParams::validate() const {
  if (!(frictionCoefficient > 0.0) || !(slipThreshold >= 0.0) || !(probePitch > 0.0) ||
      !(collisionTolerance >= 0.0) || !(contactTolerance > 0.0) || !(contactRefinement > 0.0) || !(normalStep > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "EvaluationParams: invalid parameter");
  }
}

Vec3 PosedObject::normal(const Vec3& world, double h) const {
  // Stencil along the object's own axes, so the estimate moves with the object.
  const Vec3 p = pose.applyInverse(world);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    g(i) = (model->sdf(p + e) - model->sdf(p - e)) / (2.0 * h);
  }
  const double n = g.norm();
  return n > 0.0 ? Vec3(pose.rotation * g / n) : Vec3::Zero();
}

Aabb workspaceBox(const ObjectModel& object, const GripperModel& gripper) {
  return object.bounds.inflated(gripper.jawSpan + gripper.fingerLength);
}

Aabb PosedObject::workspace(const GripperModel& gripper) const { return workspaceBox(*model, gripper); }

namespace {

int latticeCount(double length, double pitch) {
  return std::max(2, static_cast<int>(std::ceil(length / pitch - 1e-9)) + 1);
}

// Probes filling the axis-aligned box [lo, hi] given in (closing, lateral,
// approach) coordinates.
void addBoxProbes(std::vector<Vec3>& out, const GripperModel& g, const Vec3& lo, const Vec3& hi, double pitch) {
  const Vec3 lateral = g.lateralAxis();
  const int nc = latticeCount(hi.x() - lo.x(), pitch);
  const int nl = latticeCount(hi.y() - lo.y(), pitch);
  const int na = latticeCount(hi.z() - lo.z(), pitch);
  for (int a = 0; a < na; ++a) {
    const double ta = lo.z() + (hi.z() - lo.z()) * a / (na - 1);
    for (int c = 0; c < nc; ++c) {
      const double tc = lo.x() + (hi.x() - lo.x()) * c / (nc - 1);
      for (int l = 0; l < nl; ++l) {
        const double tl = lo.y() + (hi.y() - lo.y()) * l / (nl - 1);
        out.push_back(tc * g.closingAxis + tl * lateral + ta * g.approachAxis);
      }
    }
  }
}

}  // namespace

std::vector<Vec3> gripperProbeLattice(const GripperModel& g, double pitch) {
  std::vector<Vec3> probes;
  const double half = 0.5 * g.jawSpan;
  const double w = g.fingerWidth;
  // Fingertips first: they are the likeliest to hit something.
  for (double side : {1.0, -1.0}) {
    const double inner = side * half;
    const double outer = side * (half + w);
    addBoxProbes(probes, g, Vec3(std::min(inner, outer), -w, 0.0), Vec3(std::max(inner, outer), w, g.fingerLength),
                 pitch);
  }
  addBoxProbes(probes, g, Vec3(-(half + w), -w, -g.palmDepth), Vec3(half + w, w, 0.0), pitch);
  std::stable_sort(probes.begin(), probes.end(),
                   [&](const Vec3& a, const Vec3& b) { return a.dot(g.approachAxis) > b.dot(g.approachAxis); });
  return probes;
}

namespace {

// Distance travelled by a jaw starting at `start` and moving along `dir` until
// it touches the object, or nullopt if it covers `travel` without contact.
std::optional<double> closeJaw(const PosedObject& obj, const Vec3& start, const Vec3& dir, double travel, double tol,
                               double refine) {
  double prev = 0.0;
  double t = 0.0;
  for (int guard = 0; guard < 100000; ++guard) {
    const double d = obj.sdf(start + t * dir);
    if (d <= 0.0) {
      double lo = prev;
      double hi = t;
      while (hi - lo > refine) {
        const double mid = 0.5 * (lo + hi);
        if (obj.sdf(start + mid * dir) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
    if (t >= travel) return std::nullopt;
    prev = t;
    t = std::min(travel, t + std::max(d, tol));
  }
  return std::nullopt;
}

}  // namespace

GraspOutcome evaluateGrasp(const Grasp& g, const PosedObject& obj, const GripperModel& gripper,
                           const EvaluationParams& params) {
  if (!obj.workspace(gripper).contains(obj.pose.applyInverse(g.position))) return {OutcomeKind::Miss, 0.0};

  const Eigen::Matrix3d rot = g.orientation.rotationMatrix();
  thread_local std::vector<Vec3> probes;
  thread_local double probesPitch = -1.0;
  thread_local GripperModel probesGripper;
  if (probesPitch != params.probePitch || probesGripper.jawSpan != gripper.jawSpan ||
      probesGripper.fingerLength != gripper.fingerLength || probesGripper.fingerWidth != gripper.fingerWidth ||
      probesGripper.palmDepth != gripper.palmDepth || probesGripper.approachAxis != gripper.approachAxis ||
      probesGripper.closingAxis != gripper.closingAxis) {
    probes = gripperProbeLattice(gripper, params.probePitch);
    probesPitch = params.probePitch;
    probesGripper = gripper;
  }
  for (const auto& probe : probes) {
    if (obj.sdf(g.position + rot * probe) < -params.collisionTolerance) return {OutcomeKind::Collision, 0.0};
  }

  const Vec3 closing = rot * gripper.closingAxis;
  const Vec3 centre = g.position + rot * (gripper.contactDepth() * gripper.approachAxis);
  const double half = 0.5 * gripper.jawSpan;
  const Vec3 jawA = centre + half * closing;
  const Vec3 jawB = centre - half * closing;
  // A pad that starts embedded is a collision the coarse lattice missed.
  if (obj.sdf(jawA) <= 0.0 || obj.sdf(jawB) <= 0.0) return {OutcomeKind::Collision, 0.0};

  const auto tA = closeJaw(obj, jawA, -closing, gripper.jawSpan, params.contactTolerance,
                            params.contactRefinement);
  const auto tB = closeJaw(obj, jawB, closing, gripper.jawSpan, params.contactTolerance,
                            params.contactRefinement);
  if (!tA || !tB) return {OutcomeKind::Miss, 0.0};

  const Vec3 contactA = jawA - *tA * closing;
  const Vec3 contactB = jawB + *tB * closing;
  const Vec3 nA = obj.normal(contactA, params.normalStep);
  const Vec3 nB = obj.normal(contactB, params.normalStep);

  const double cosFriction = 1.0 / std::sqrt(1.0 + params.frictionCoefficient * params.frictionCoefficient);
  const double antipodal = std::max(0.0, -nA.dot(nB));
  const double marginA = std::max(0.0, (nA.dot(closing) - cosFriction) / (1.0 - cosFriction));
  const double marginB = std::max(0.0, (-nB.dot(closing) - cosFriction) / (1.0 - cosFriction));
  const double quality = std::min(1.0, antipodal * std::min(marginA, marginB));

  if (!(quality > params.slipThreshold)) return {OutcomeKind::Slipped, 0.0};
  return {OutcomeKind::Success, quality};
}

GraspOutcome evaluateGrasp(const Grasp& g, const ObjectModel& object, const GripperModel& gripper,
                           const EvaluationParams& params) {
  return evaluateGrasp(g, PosedObject{&object, {}}, gripper, params);
}

double targetDensity(const Grasp& g, const ObjectModel& object, const GripperModel& gripper,
                     const EvaluationParams& params) {
  return evaluateGrasp(g, object, gripper, params).quality;
}

GraspTarget::GraspTarget(const ObjectModel& object, GripperModel gripper, EvaluationParams params)
    : object_(&object), gripper_(std::move(gripper)), params_(params) {
  gripper_.validate();
  params_.validate();
}

Evaluation GraspTarget::evaluate(const Vector& state) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  const GraspOutcome o = evaluateGrasp(Grasp::fromState(state), *object_, gripper_, params_);
  return {o.quality, o.kind};
}

// ---------------------------------------------------------------- catalog

namespace {

SdfNode hollowCylinder(double radius, double height, double wall, double floor) {
  const double cavityHalf = 0.5 * height;
  return SdfNode::subtract(SdfNode::cylinder(radius, 0.5 * height, translation(Vec3(0, 0, 0.5 * height))),
                           {SdfNode::cylinder(radius - wall, cavityHalf, translation(Vec3(0, 0, floor + cavityHalf)))});
}

ObjectModel pitcher(const std::string& name, double radius, double height, double handleRadius, double handleHeight) {
  // Ring in the xz plane with the arc bulging towards +x.
  const RigidTransform handlePose =
      RigidTransform{Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitY()).toRotationMatrix() *
                         Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitX()).toRotationMatrix(),
                     Vec3(radius, 0.0, handleHeight)};
  const double halfArc = 80.0 * std::numbers::pi / 180.0;
  return ObjectModel(name, SdfNode::unite({hollowCylinder(radius, height, 0.005, 0.015),
                                           SdfNode::torusSegment(handleRadius, 0.008, halfArc, handlePose)}));
}

ObjectModel pan(const std::string& name, double radius, double height, double handleLength) {
  const double halfLen = 0.5 * handleLength;
  const SdfNode handle =
      SdfNode::box(Vec3(halfLen, 0.0125, 0.006), translation(Vec3(radius + halfLen - 0.002, 0.0, height - 0.01)));
  return ObjectModel(name, SdfNode::unite({hollowCylinder(radius, height, 0.004, 0.005), handle}));
}

ObjectModel flatPlate(const std::string& name, double radius, double thickness) {
  return ObjectModel(name, SdfNode::cylinder(radius, 0.5 * thickness, translation(Vec3(0, 0, 0.5 * thickness))));
}

ObjectModel soupPlate(const std::string& name, double radius, double height, double rimWidth, double floor) {
  return ObjectModel(name, hollowCylinder(radius, height, rimWidth, floor));
}

std::vector<ObjectModel> buildCatalog() {
  std::vector<ObjectModel> c;
  c.push_back(pitcher("pitcher", 0.06, 0.16, 0.045, 0.09));
  c.push_back(pan("pan", 0.11, 0.05, 0.15));
  c.push_back(flatPlate("plate", 0.12, 0.02));
  c.push_back(pitcher("tall_pitcher", 0.05, 0.26, 0.06, 0.15));
  c.push_back(pan("small_pan", 0.08, 0.04, 0.12));
  c.push_back(soupPlate("soup_plate", 0.11, 0.025, 0.025, 0.008));
  c.push_back(pitcher("squat_pitcher", 0.07, 0.12, 0.04, 0.065));
  c.push_back(pan("deep_pan", 0.13, 0.07, 0.18));
  c.push_back(flatPlate("dessert_plate", 0.09, 0.016));
  return c;
}

}  // namespace

const std::vector<ObjectModel>& objectCatalog() {
  static const std::vector<ObjectModel> catalog = buildCatalog();
  return catalog;
}

const ObjectModel& findObject(const std::vector<ObjectModel>& catalog, const std::string& name) {
  for (const auto& o : catalog) {
    if (o.name == name) return o;
  }
  throw Error(ErrorCode::UnknownObject, "unknown object '" + name + "'");
}

Vec3 sampleSurfacePoint(const ObjectModel& object, Rng& rng, double shell, std::size_t maxTries) {
  const Aabb& b = object.bounds;
  for (std::size_t i = 0; i < maxTries; ++i) {
    const Vec3 p(rng.uniform(b.lower.x(), b.upper.x()), rng.uniform(b.lower.y(), b.upper.y()),
                 rng.uniform(b.lower.z(), b.upper.z()));
    if (std::abs(object.sdf(p)) < shell) return p;
  }
  throw Error(ErrorCode::DemonstrationFailure, "sampleSurfacePoint: no surface point found in '" + object.name + "'");
}

// ---------------------------------------------------------------- demonstrations

namespace {

Vec3 anyPerpendicular(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(helper).normalized();
}

// Rotation taking the gripper's (closing, lateral, approach) frame onto the
// given world directions.
UnitQuaternion orientationFor(const GripperModel& g, const Vec3& approachWorld, const Vec3& closingWorld) {
  Eigen::Matrix3d world;
  world.col(0) = closingWorld;
  world.col(1) = approachWorld.cross(closingWorld);
  world.col(2) = approachWorld;
  Eigen::Matrix3d local;
  local.col(0) = g.closingAxis;
  local.col(1) = g.lateralAxis();
  local.col(2) = g.approachAxis;
  return UnitQuaternion::fromRotation(world * local.transpose());
}

Grasp placeAbout(const GripperModel& g, const Vec3& centre, const UnitQuaternion& q) {
  return Grasp{centre - q.rotate(g.approachAxis) * g.contactDepth(), q};
}

// Object thickness along `dir` starting just inside `p`, capped at `cap`.
double thicknessAlong(const ObjectModel& o, const Vec3& p, const Vec3& dir, double cap) {
  const double step = 5e-4;
  for (double t = step; t < cap; t += step) {
    if (o.sdf(p + t * dir) > 0.0) return t;
  }
  return cap;
}

}  // namespace

std::vector<Demonstration> demonstrateGrasps(const ObjectModel& object, const GripperModel& gripper, std::size_t count,
                                             Rng& rng, const EvaluationParams& params, const DemonstrationParams& demo) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "demonstrateGrasps: count must be >= 1");
  gripper.validate();
  const PosedObject posed{&object, {}};
  const double reach = gripper.contactDepth() - 0.005;
  const std::size_t restarts = std::max<std::size_t>(1, demo.restarts);
  const std::size_t trialsPerRestart = std::max<std::size_t>(1, demo.trialsPerAttempt / restarts);

  std::vector<Demonstration> out;
  for (std::size_t attempt = 0; attempt < demo.maxAttempts && out.size() < count; ++attempt) {
    const Vec3 p = sampleSurfacePoint(object, rng);
    const Vec3 n = posed.normal(p, params.normalStep);
    if (n.squaredNorm() == 0.0) continue;
    const double mid = 0.5 * thicknessAlong(object, p, -n, 2.0 * reach);
    const double insets[] = {std::min(mid, reach), 0.01, 0.02, 0.005};

    Demonstration best;
    OutcomeKind bestKind = OutcomeKind::Miss;
    for (std::size_t r = 0; r < restarts; ++r) {
      const Vec3 centre = p - n * insets[r % std::size(insets)];
      const double roll = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Vec3 e1 = anyPerpendicular(n);
      const Vec3 closing = std::cos(roll) * e1 + std::sin(roll) * n.cross(e1);
      UnitQuaternion q = orientationFor(gripper, -n, closing);
      Grasp g = placeAbout(gripper, centre, q);
      GraspOutcome o = evaluateGrasp(g, object, gripper, params);
      double localBest = o.quality;
      if (o.quality > best.quality) {
        best = {g, o.quality};
        bestKind = o.kind;
      }
      for (std::size_t t = 0; t < trialsPerRestart; ++t) {
        const VonMisesFisher perturb(Vector(q.coeffs()), demo.perturbationKappa);
        const Vector qs = perturb.sample(rng);
        const UnitQuaternion cand = UnitQuaternion::canonicalize(qs(0), qs(1), qs(2), qs(3));
        const Grasp cg = placeAbout(gripper, centre, cand);
        const GraspOutcome co = evaluateGrasp(cg, object, gripper, params);
        // Drift freely across zero-quality plateaus, otherwise only climb.
        if (co.quality > localBest || (localBest == 0.0 && co.quality == 0.0)) {
          q = cand;
          localBest = co.quality;
          if (co.quality > best.quality) {
            best = {cg, co.quality};
            bestKind = co.kind;
          }
        }
      }
      if (best.quality >= 0.99) break;
    }
    if (bestKind == OutcomeKind::Success && best.quality > 0.0) out.push_back(best);
  }
  if (out.size() < count) {
    throw Error(ErrorCode::DemonstrationFailure, "demonstrateGrasps: only " + std::to_string(out.size()) + " of " +
                                                     std::to_string(count) + " grasps found on '" + object.name + "'");
  }
  return out;
}

}  // namespace graspmc::grasp
