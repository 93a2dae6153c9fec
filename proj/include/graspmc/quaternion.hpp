#pragma once

#include <Eigen/Geometry>

#include "graspmc/linalg.hpp"

namespace graspmc {

/// Unit quaternion in canonical form: unit norm, w >= 0, and when w == 0 the
/// first nonzero of (x, y, z) is positive. q and -q describe the same rotation;
/// canonicalisation picks one representative so that Euclidean distances on the
/// 7D grasp vector never see the double cover.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  /// Normalises and canonicalises. Throws ZeroQuaternion for ||q|| <= 1e-12.
  static UnitQuaternion canonicalize(double w, double x, double y, double z);
  static UnitQuaternion canonicalize(const Eigen::Vector4d& wxyz);
  static UnitQuaternion fromRotation(const Eigen::Matrix3d& rotation);
  static UnitQuaternion fromAxisAngle(const Eigen::Vector3d& axis, double angle);

  double w() const noexcept { return w_; }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  Eigen::Vector4d coeffs() const noexcept { return {w_, x_, y_, z_}; }
  Eigen::Matrix3d rotationMatrix() const;
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;

  /// Hamilton product, canonicalised.
  UnitQuaternion operator*(const UnitQuaternion& rhs) const;
  UnitQuaternion conjugate() const;

 private:
  UnitQuaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}

  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

/// Rewrites components [offset, offset + 4) of a state vector as a canonical
/// unit quaternion.
void canonicalizeQuaternionBlock(Vector& state, Eigen::Index offset);

}  // namespace graspmc
