#include "graspmc/quaternion.hpp"

#include <cmath>

#include "graspmc/error.hpp"

namespace graspmc {

UnitQuaternion UnitQuaternion::canonicalize(double w, double x, double y, double z) {
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(norm > 1e-12) || !std::isfinite(norm)) {
    throw Error(ErrorCode::ZeroQuaternion, "quaternion norm too small to normalise");
  }
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;
  bool flip = w < 0.0;
  if (w == 0.0) {
    if (x != 0.0) {
      flip = x < 0.0;
    } else if (y != 0.0) {
      flip = y < 0.0;
    } else {
      flip = z < 0.0;
    }
  }
  if (flip) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  // -0.0 would otherwise survive as a sign artefact.
  if (w == 0.0) w = 0.0;
  return UnitQuaternion(w, x, y, z);
}

UnitQuaternion UnitQuaternion::canonicalize(const Eigen::Vector4d& wxyz) {
  return canonicalize(wxyz(0), wxyz(1), wxyz(2), wxyz(3));
}

UnitQuaternion UnitQuaternion::fromRotation(const Eigen::Matrix3d& rotation) {
  const Eigen::Quaterniond q(rotation);
  return canonicalize(q.w(), q.x(), q.y(), q.z());
}

UnitQuaternion UnitQuaternion::fromAxisAngle(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d a = axis.normalized();
  const double s = std::sin(0.5 * angle);
  return canonicalize(std::cos(0.5 * angle), a.x() * s, a.y() * s, a.z() * s);
}

Eigen::Matrix3d UnitQuaternion::rotationMatrix() const {
  return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& v) const { return rotationMatrix() * v; }

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& r) const {
  return canonicalize(w_ * r.w_ - x_ * r.x_ - y_ * r.y_ - z_ * r.z_,
                      w_ * r.x_ + x_ * r.w_ + y_ * r.z_ - z_ * r.y_,
                      w_ * r.y_ - x_ * r.z_ + y_ * r.w_ + z_ * r.x_,
                      w_ * r.z_ + x_ * r.y_ - y_ * r.x_ + z_ * r.w_);
}

UnitQuaternion UnitQuaternion::conjugate() const { return canonicalize(w_, -x_, -y_, -z_); }

void canonicalizeQuaternionBlock(Vector& state, Eigen::Index offset) {
  const auto q = UnitQuaternion::canonicalize(state(offset), state(offset + 1), state(offset + 2), state(offset + 3));
  state(offset) = q.w();
  state(offset + 1) = q.x();
  state(offset + 2) = q.y();
  state(offset + 3) = q.z();
}

}  // namespace graspmc
