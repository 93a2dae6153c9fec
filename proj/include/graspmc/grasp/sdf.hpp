#pragma once

#include <Eigen/Geometry>

#include <string>
#include <vector>

namespace graspmc::grasp {

using Vec3 = Eigen::Vector3d;

/// Rigid transform p -> rotation * p + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 applyInverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
  RigidTransform inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }
  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
};

struct Aabb {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();

  Vec3 size() const { return upper - lower; }
  Vec3 center() const { return 0.5 * (lower + upper); }
  bool contains(const Vec3& p) const {
    return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
  }
  Aabb inflated(double margin) const { return {lower.array() - margin, upper.array() + margin}; }
  Aabb merged(const Aabb& o) const { return {lower.cwiseMin(o.lower), upper.cwiseMax(o.upper)}; }
  Aabb transformed(const RigidTransform& t) const;
};

/// Signed distance tree. Leaves are primitives in their local frame; inner
/// nodes combine children. Every node may carry a local pose, so a node's
/// distance at p is the untransformed distance at pose^{-1} p.
///
/// Primitive conventions (local frame):
///   Sphere        radius
///   Box           halfExtents
///   Cylinder      radius, halfHeight; axis +z, centred on the origin
///   TorusSegment  majorRadius, minorRadius, arcHalfAngle; ring in the xy
///                 plane around +z, arc symmetric about +y
/// Unions, intersections and differences (first child minus the rest) are
/// exact outside and a lower bound inside, which keeps them 1-Lipschitz.
struct SdfNode {
  enum class Kind { Sphere, Box, Cylinder, TorusSegment, Union, Intersection, Difference };

  Kind kind = Kind::Sphere;
  RigidTransform pose;
  double radius = 0.0;
  double halfHeight = 0.0;
  Vec3 halfExtents = Vec3::Zero();
  double majorRadius = 0.0;
  double minorRadius = 0.0;
  double arcHalfAngle = 0.0;
  std::vector<SdfNode> children;

  double distance(const Vec3& p) const;
  Aabb bounds() const;

  static SdfNode sphere(double radius, RigidTransform pose = {});
  static SdfNode box(const Vec3& halfExtents, RigidTransform pose = {});
  static SdfNode cylinder(double radius, double halfHeight, RigidTransform pose = {});
  static SdfNode torusSegment(double majorRadius, double minorRadius, double arcHalfAngle, RigidTransform pose = {});
  static SdfNode unite(std::vector<SdfNode> children, RigidTransform pose = {});
  static SdfNode intersect(std::vector<SdfNode> children, RigidTransform pose = {});
  static SdfNode subtract(SdfNode base, std::vector<SdfNode> cutters, RigidTransform pose = {});
};

const char* sdfKindName(SdfNode::Kind kind);
SdfNode::Kind sdfKindFromName(const std::string& name);

RigidTransform translation(const Vec3& t);
RigidTransform rotationAbout(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());

}  // namespace graspmc::grasp
