#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace coop {

using Vector3d = Eigen::Vector3d;
using Vector4d = Eigen::Vector4d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix3d = Eigen::Matrix3d;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix43d = Eigen::Matrix<double, 4, 3>;

namespace spatial {

// Unit quaternion stored scalar first: (eta, eps1, eps2, eps3).
// Every constructor normalizes, so eta^2 + |eps|^2 = 1 up to rounding.
class UnitQuaternion {
 public:
  UnitQuaternion() : coeffs_(1.0, 0.0, 0.0, 0.0) {}

  // Throws std::invalid_argument for a zero or non-finite input.
  UnitQuaternion(double eta, const Vector3d& epsilon);
  explicit UnitQuaternion(const Vector4d& coeffs);

  static UnitQuaternion identity() { return {}; }
  // Rotation by `angle` (rad) about `axis` (normalized internally).
  static UnitQuaternion from_axis_angle(const Vector3d& axis, double angle);

  double eta() const { return coeffs_[0]; }
  Vector3d epsilon() const { return coeffs_.tail<3>(); }
  const Vector4d& coeffs() const { return coeffs_; }

  UnitQuaternion conjugate() const;
  UnitQuaternion operator-() const;

  bool operator==(const UnitQuaternion& other) const = default;

 private:
  Vector4d coeffs_;
};

// Orthonormal 3x3 matrix with det = +1.
class Rotation {
 public:
  Rotation() : matrix_(Matrix3d::Identity()) {}

  // Throws std::invalid_argument unless |R^T R - I| and |det R - 1| are
  // within `tolerance`.
  static Rotation from_matrix(const Matrix3d& m, double tolerance = 1e-6);

  const Matrix3d& matrix() const { return matrix_; }
  Vector3d operator*(const Vector3d& v) const { return matrix_ * v; }
  Rotation operator*(const Rotation& other) const;
  Rotation transpose() const;

 private:
  explicit Rotation(const Matrix3d& m) : matrix_(m) {}
  Matrix3d matrix_;

  friend Rotation quat_to_rotation(const UnitQuaternion& q);
};

// World-frame spatial velocity: linear velocity of a reference point and
// angular velocity of the body.
struct Twist {
  Vector3d linear = Vector3d::Zero();
  Vector3d angular = Vector3d::Zero();

  static Twist from_vector(const Vector6d& v) { return {v.head<3>(), v.tail<3>()}; }
  Vector6d vector() const {
    Vector6d out;
    out << linear, angular;
    return out;
  }
};

struct Wrench {
  Vector3d force = Vector3d::Zero();
  Vector3d torque = Vector3d::Zero();

  static Wrench from_vector(const Vector6d& w) { return {w.head<3>(), w.tail<3>()}; }
  Vector6d vector() const {
    Vector6d out;
    out << force, torque;
    return out;
  }
};

// Yaw-pitch-roll angles, R = Rz(yaw) Ry(pitch) Rx(roll).
struct EulerZYX {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

// S(a) b = a x b.
Matrix3d skew(const Vector3d& a);

UnitQuaternion quat_product(const UnitQuaternion& q1, const UnitQuaternion& q2);
inline UnitQuaternion operator*(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return quat_product(q1, q2);
}
inline UnitQuaternion quat_conjugate(const UnitQuaternion& q) { return q.conjugate(); }

// E(q) = [-eps^T; eta I - S(eps)], the map from world angular velocity to
// quaternion rate (up to the factor 1/2).
Matrix43d e_matrix(const UnitQuaternion& q);

// qdot = 1/2 E(q) omega, with omega in the world frame.
Vector4d quat_rate(const UnitQuaternion& q, const Vector3d& omega);
// omega = 2 E(q)^T qdot.
Vector3d omega_from_quat_rate(const UnitQuaternion& q, const Vector4d& qdot);

Rotation quat_to_rotation(const UnitQuaternion& q);
// Returns the quaternion with eta >= 0. Throws std::invalid_argument if `m`
// is not a rotation within 1e-6.
UnitQuaternion rotation_to_quat(const Matrix3d& m);
inline UnitQuaternion rotation_to_quat(const Rotation& r) { return rotation_to_quat(r.matrix()); }

UnitQuaternion euler_to_quat(const EulerZYX& angles);
EulerZYX quat_to_euler(const UnitQuaternion& q);

// Exact step for constant world-frame omega: exp(omega dt / 2) (x) q.
// Throws std::invalid_argument unless dt > 0.
UnitQuaternion integrate_quat(const UnitQuaternion& q, const Vector3d& omega, double dt);

// Geodesic angle (rad, in [0, pi]) between the rotations of two quaternions.
double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b);

// Returns q or -q, whichever is closer to `reference` in R^4.
UnitQuaternion continue_sign(const UnitQuaternion& reference, const UnitQuaternion& q);

}  // namespace spatial
}  // namespace coop
