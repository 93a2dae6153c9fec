#include "graspmc/grasp/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspmc/error.hpp"

namespace graspmc::grasp {

Aabb Aabb::transformed(const RigidTransform& t) const {
  Aabb out{Vec3::Constant(std::numeric_limits<double>::infinity()),
           Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p((corner & 1) ? upper.x() : lower.x(), (corner & 2) ? upper.y() : lower.y(),
                 (corner & 4) ? upper.z() : lower.z());
    const Vec3 q = t.apply(p);
    out.lower = out.lower.cwiseMin(q);
    out.upper = out.upper.cwiseMax(q);
  }
  return out;
}

namespace {

double sdSphere(const Vec3& p, double r) { return p.norm() - r; }

double sdBox(const Vec3& p, const Vec3& b) {
  const Vec3 q = p.cwiseAbs() - b;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

double sdCylinder(const Vec3& p, double r, double h) {
  const double dx = std::hypot(p.x(), p.y()) - r;
  const double dz = std::abs(p.z()) - h;
  return std::min(std::max(dx, dz), 0.0) + std::hypot(std::max(dx, 0.0), std::max(dz, 0.0));
}

double sdTorusSegment(const Vec3& p, double major, double minor, double halfAngle) {
  const double sx = std::sin(halfAngle);
  const double cy = std::cos(halfAngle);
  const double px = std::abs(p.x());
  const double k = (cy * px > sx * p.y()) ? (px * sx + p.y() * cy) : std::hypot(px, p.y());
  const double sq = px * px + p.y() * p.y() + p.z() * p.z() + major * major - 2.0 * major * k;
  return std::sqrt(std::max(sq, 0.0)) - minor;
}

}  // namespace

double SdfNode::distance(const Vec3& world) const {
  const Vec3 p = pose.applyInverse(world);
  switch (kind) {
    case Kind::Sphere: return sdSphere(p, radius);
    case Kind::Box: return sdBox(p, halfExtents);
    case Kind::Cylinder: return sdCylinder(p, radius, halfHeight);
    case Kind::TorusSegment: return sdTorusSegment(p, majorRadius, minorRadius, arcHalfAngle);
    case Kind::Union: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : children) d = std::min(d, c.distance(p));
      return d;
    }
    case Kind::Intersection: {
      double d = -std::numeric_limits<double>::infinity();
      for (const auto& c : children) d = std::max(d, c.distance(p));
      return d;
    }
    case Kind::Difference: {
      double d = children.front().distance(p);
      for (std::size_t i = 1; i < children.size(); ++i) d = std::max(d, -children[i].distance(p));
      return d;
    }
  }
  return std::numeric_limits<double>::infinity();
}

Aabb SdfNode::bounds() const {
  Aabb local;
  switch (kind) {
    case Kind::Sphere: local = {Vec3::Constant(-radius), Vec3::Constant(radius)}; break;
    case Kind::Box: local = {-halfExtents, halfExtents}; break;
    case Kind::Cylinder: local = {Vec3(-radius, -radius, -halfHeight), Vec3(radius, radius, halfHeight)}; break;
    case Kind::TorusSegment: {
      const double outer = majorRadius + minorRadius;
      local = {Vec3(-outer, -outer, -minorRadius), Vec3(outer, outer, minorRadius)};
      break;
    }
    case Kind::Union: {
      local = children.front().bounds();
      for (std::size_t i = 1; i < children.size(); ++i) local = local.merged(children[i].bounds());
      break;
    }
    case Kind::Intersection: {
      local = children.front().bounds();
      for (std::size_t i = 1; i < children.size(); ++i) {
        const Aabb b = children[i].bounds();
        local.lower = local.lower.cwiseMax(b.lower);
        local.upper = local.upper.cwiseMin(b.upper);
      }
      break;
    }
    case Kind::Difference: local = children.front().bounds(); break;
  }
  return local.transformed(pose);
}

namespace {

void requirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string("sdf: ") + what + " must be positive");
  }
}

}  // namespace

SdfNode SdfNode::sphere(double r, RigidTransform pose) {
  requirePositive(r, "sphere radius");
  SdfNode n;
  n.kind = Kind::Sphere;
  n.radius = r;
  n.pose = pose;
  return n;
}

SdfNode SdfNode::box(const Vec3& halfExtents, RigidTransform pose) {
  for (int i = 0; i < 3; ++i) requirePositive(halfExtents(i), "box half extent");
  SdfNode n;
  n.kind = Kind::Box;
  n.halfExtents = halfExtents;
  n.pose = pose;
  return n;
}

SdfNode SdfNode::cylinder(double r, double halfHeight, RigidTransform pose) {
  requirePositive(r, "cylinder radius");
  requirePositive(halfHeight, "cylinder half height");
  SdfNode n;
  n.kind = Kind::Cylinder;
  n.radius = r;
  n.halfHeight = halfHeight;
  n.pose = pose;
  return n;
}

SdfNode SdfNode::torusSegment(double major, double minor, double halfAngle, RigidTransform pose) {
  requirePositive(major, "torus major radius");
  requirePositive(minor, "torus minor radius");
  requirePositive(halfAngle, "torus arc half angle");
  SdfNode n;
  n.kind = Kind::TorusSegment;
  n.majorRadius = major;
  n.minorRadius = minor;
  n.arcHalfAngle = halfAngle;
  n.pose = pose;
  return n;
}

SdfNode SdfNode::unite(std::vector<SdfNode> children, RigidTransform pose) {
  if (children.empty()) throw Error(ErrorCode::InvalidArgument, "sdf: union needs children");
  SdfNode n;
  n.kind = Kind::Union;
  n.children = std::move(children);
  n.pose = pose;
  return n;
}

SdfNode SdfNode::intersect(std::vector<SdfNode> children, RigidTransform pose) {
  if (children.empty()) throw Error(ErrorCode::InvalidArgument, "sdf: intersection needs children");
  SdfNode n;
  n.kind = Kind::Intersection;
  n.children = std::move(children);
  n.pose = pose;
  return n;
}

SdfNode SdfNode::subtract(SdfNode base, std::vector<SdfNode> cutters, RigidTransform pose) {
  SdfNode n;
  n.kind = Kind::Difference;
  n.children.reserve(cutters.size() + 1);
  n.children.push_back(std::move(base));
  for (auto& c : cutters) n.children.push_back(std::move(c));
  n.pose = pose;
  return n;
}

const char* sdfKindName(SdfNode::Kind kind) {
  switch (kind) {
    case SdfNode::Kind::Sphere: return "sphere";
    case SdfNode::Kind::Box: return "box";
    case SdfNode::Kind::Cylinder: return "cylinder";
    case SdfNode::Kind::TorusSegment: return "torus_segment";
    case SdfNode::Kind::Union: return "union";
    case SdfNode::Kind::Intersection: return "intersection";
    case SdfNode::Kind::Difference: return "difference";
  }
  return "sphere";
}

SdfNode::Kind sdfKindFromName(const std::string& name) {
  for (auto k : {SdfNode::Kind::Sphere, SdfNode::Kind::Box, SdfNode::Kind::Cylinder, SdfNode::Kind::TorusSegment,
                 SdfNode::Kind::Union, SdfNode::Kind::Intersection, SdfNode::Kind::Difference}) {
    if (name == sdfKindName(k)) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown sdf node kind '" + name + "'");
}

RigidTransform translation(const Vec3& t) { return {Eigen::Matrix3d::Identity(), t}; }

RigidTransform rotationAbout(const Vec3& axis, double angle, const Vec3& t) {
  return {Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), t};
}

}  // namespace graspmc::grasp
