#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "graspmc/error.hpp"
#include "graspmc/grasp/grasp.hpp"
#include "graspmc/vmf.hpp"
#include "support.hpp"

using namespace graspmc;
using namespace graspmc::grasp;

namespace {

const ObjectModel& catalogObject(const std::string& name) { return findObject(objectCatalog(), name); }

Grasp makeGrasp(const Vec3& p, const Eigen::Matrix3d& r) { return {p, UnitQuaternion::fromRotation(r)}; }

/// Gripper frame whose approach axis is `approach` and closing axis `closing`.
Eigen::Matrix3d frame(const Vec3& approach, const Vec3& closing) {
  Eigen::Matrix3d r;
  r.col(0) = closing.normalized();
  r.col(2) = approach.normalized();
  r.col(1) = r.col(2).cross(r.col(0));
  return r;
}

Grasp randomGrasp(const Aabb& box, Rng& rng) {
  Grasp g;
  for (int i = 0; i < 3; ++i) g.position[i] = rng.uniform(box.lower[i], box.upper[i]);
  g.orientation = UnitQuaternion::canonicalize(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return g;
}

RigidTransform randomPose(Rng& rng) {
  const auto q = UnitQuaternion::canonicalize(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return {q.rotationMatrix(), Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))};
}

}  // namespace

TEST_CASE("plate rim grasp is a high-quality success") {
  const auto& plate = catalogObject("plate");
  const GripperModel gripper;
  const double top = plate.bounds.upper.z(), bottom = plate.bounds.lower.z();
  const double rim = plate.bounds.upper.x();
  // Contact line 1 cm inside the rim, half-way through the plate thickness.
  const Vec3 palm(rim - 0.01 + gripper.contactDepth(), 0.0, 0.5 * (top + bottom));
  const Grasp g = makeGrasp(palm, frame(-Vec3::UnitX(), Vec3::UnitZ()));
  const auto o = evaluateGrasp(g, plate, gripper);
  CHECK(o.kind == OutcomeKind::Success);
  CHECK(o.quality >= 0.9);
  CHECK(targetDensity(g, plate, gripper) >= 0.9);
  CHECK(targetDensity(g, plate, gripper) <= 1.0);
}

TEST_CASE("forced collision and miss") {
  const GripperModel gripper;
  const ObjectModel ball("ball", SdfNode::sphere(0.2));
  const Grasp inside = makeGrasp(Vec3::Zero(), Eigen::Matrix3d::Identity());
  CHECK(ball.sdf(inside.position) < -gripper.fingerLength);
  CHECK(evaluateGrasp(inside, ball, gripper).kind == OutcomeKind::Collision);
  CHECK(evaluateGrasp(inside, ball, gripper).quality == 0.0);

  const auto& plate = catalogObject("plate");
  const double far = gripper.jawSpan + gripper.fingerLength + 0.01;
  const Grasp away = makeGrasp(Vec3(0, 0, plate.bounds.upper.z() + far), Eigen::Matrix3d::Identity());
  CHECK(evaluateGrasp(away, plate, gripper).kind == OutcomeKind::Miss);
  const Grasp outside = makeGrasp(Vec3(5, 5, 5), Eigen::Matrix3d::Identity());
  CHECK(evaluateGrasp(outside, plate, gripper).kind == OutcomeKind::Miss);
}

TEST_CASE("probe lattice covers the gripper") {
  const GripperModel gripper;
  CHECK(gripperProbeLattice(gripper, 0.005).size() >= 200);
  GripperModel bad;
  bad.jawSpan = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("catalog") {
  const auto& cat = objectCatalog();
  REQUIRE(cat.size() == 9);
  for (const auto& o : cat) {
    const auto& b = o.bounds;
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 p((corner & 1) ? b.upper.x() : b.lower.x(), (corner & 2) ? b.upper.y() : b.lower.y(),
                   (corner & 4) ? b.upper.z() : b.lower.z());
      CHECK_MESSAGE(o.sdf(p) > 0.0, o.name);
    }
  }
  const Vec3 plate = catalogObject("plate").bounds.size(), soup = catalogObject("soup_plate").bounds.size();
  for (int i = 0; i < 3; ++i) CHECK(std::abs(plate[i] - soup[i]) / std::max(plate[i], soup[i]) <= 0.30);
  const double h1 = catalogObject("pitcher").bounds.size().z(), h2 = catalogObject("tall_pitcher").bounds.size().z();
  CHECK((h2 - h1) / h1 > 0.40);
  CHECK_THROWS_AS(findObject(cat, "teapot"), Error);
}

TEST_CASE("sdf is 1-Lipschitz with unit gradients at the surface") {
  Rng rng(5);
  for (const auto& o : objectCatalog()) {
    const Aabb box = o.bounds.inflated(0.05);
    for (int i = 0; i < 1000; ++i) {
      Vec3 a, b;
      for (int k = 0; k < 3; ++k) {
        a[k] = rng.uniform(box.lower[k], box.upper[k]);
        b[k] = a[k] + 0.02 * rng.normal();
      }
      CHECK_MESSAGE(std::abs(o.sdf(a) - o.sdf(b)) <= (a - b).norm() + 1e-3, o.name);
    }
    const double h = 1e-5;
    int creases = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = sampleSurfacePoint(o, rng);
      Vec3 g;
      bool smooth = true;
      for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = h;
        const double f0 = o.sdf(p), fp = o.sdf(p + e), fm = o.sdf(p - e);
        g[k] = (fp - fm) / (2 * h);
        // One-sided slopes disagree only where the stencil straddles a CSG crease.
        smooth = smooth && std::abs((fp - f0) - (f0 - fm)) / h < 0.01;
      }
      if (!smooth) {
        ++creases;
        continue;
      }
      CHECK_MESSAGE(std::abs(g.norm() - 1.0) < 1e-3, o.name);
    }
    CHECK_MESSAGE(creases <= 10, o.name);
  }
}

TEST_CASE("evaluation invariants over random grasps") {
  Rng rng(9);
  const GripperModel gripper;
  for (const auto& o : objectCatalog()) {
    const auto demos = demonstrateGrasps(o, gripper, 3, rng);
    const Aabb ws = workspaceBox(o, gripper);
    for (int i = 0; i < 100; ++i) {
      Grasp g = i % 2 ? randomGrasp(o.bounds.inflated(0.05), rng) : demos[std::size_t(i) % demos.size()].grasp;
      if (i % 4 == 0) {
        g.position += 0.003 * Vec3(rng.normal(), rng.normal(), rng.normal());
        g.orientation = UnitQuaternion::canonicalize(VonMisesFisher(g.orientation.coeffs(), 500.0).sample(rng));
      }
      const auto first = evaluateGrasp(g, o, gripper);
      const auto second = evaluateGrasp(g, o, gripper);
      CHECK(first.kind == second.kind);
      CHECK(first.quality == second.quality);
      CHECK(first.quality >= 0.0);
      CHECK((first.quality > 0.0) == (first.kind == OutcomeKind::Success));
      CHECK(ws.contains(o.bounds.center()));

      const RigidTransform pose = randomPose(rng);
      const Grasp moved{pose.apply(g.position),
                        UnitQuaternion::fromRotation(pose.rotation * g.orientation.rotationMatrix())};
      const auto world = evaluateGrasp(moved, PosedObject{&o, pose}, gripper);
      CHECK_MESSAGE(world.kind == first.kind, o.name);
      CHECK_MESSAGE(std::abs(world.quality - first.quality) < 1e-6, o.name);
    }
  }
}

TEST_CASE("GraspTarget counts evaluations") {
  const auto& plate = catalogObject("plate");
  GraspTarget t(plate, GripperModel{});
  Vector s = Grasp{}.toState();
  s[2] = 3.0;
  CHECK(t.evaluate(s).outcome == OutcomeKind::Miss);
  CHECK(t.evaluations() == 1);
  CHECK(t.dimension() == 7);
}

TEST_CASE("demonstrations") {
  const GripperModel gripper;
  Rng rng(2);
  SUBCASE("plate") {
    const auto demos = demonstrateGrasps(catalogObject("plate"), gripper, 5, rng);
    REQUIRE(demos.size() == 5);
    for (const auto& d : demos) {
      CHECK(d.quality > 0.0);
      CHECK(targetDensity(d.grasp, catalogObject("plate"), gripper) == d.quality);
    }
  }
  SUBCASE("small sphere is always graspable") {
    const ObjectModel ball("ball", SdfNode::sphere(0.3 * gripper.jawSpan));
    CHECK(demonstrateGrasps(ball, gripper, 1, rng).size() == 1);
  }
  SUBCASE("huge box is not") {
    const double side = 10.0 * gripper.jawSpan;
    const ObjectModel box("box", SdfNode::box(Vec3::Constant(0.5 * side)));
    try {
      demonstrateGrasps(box, gripper, 1, rng);
      FAIL("expected DemonstrationFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DemonstrationFailure);
    }
  }
  SUBCASE("deterministic under a seed") {
    Rng a(4), b(4);
    const auto d1 = demonstrateGrasps(catalogObject("pan"), gripper, 2, a);
    const auto d2 = demonstrateGrasps(catalogObject("pan"), gripper, 2, b);
    CHECK(d1[0].grasp.toState() == d2[0].grasp.toState());
    CHECK(d1[1].quality == d2[1].quality);
  }
}

TEST_CASE("grasp state round trip") {
  const Grasp g{Vec3(0.1, -0.2, 0.3), UnitQuaternion::fromAxisAngle(Vec3(1, 1, 0), 0.7)};
  const Grasp back = Grasp::fromState(g.toState());
  CHECK(back.position == g.position);
  CHECK((back.orientation.coeffs() - g.orientation.coeffs()).norm() < 1e-15);
  Vector bad = g.toState();
  bad.segment(3, 4).setZero();
  CHECK_THROWS_AS(Grasp::fromState(bad), Error);
}
