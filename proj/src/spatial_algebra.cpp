#include "coop/spatial_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coop::spatial {

UnitQuaternion::UnitQuaternion(double eta, const Vector3d& epsilon)
    : UnitQuaternion(Vector4d(eta, epsilon[0], epsilon[1], epsilon[2])) {}

UnitQuaternion::UnitQuaternion(const Vector4d& coeffs) {
  const double n = coeffs.norm();
  if (!std::isfinite(n) || n < 1e-12) {
    throw std::invalid_argument("UnitQuaternion: cannot normalize a zero or non-finite quaternion");
  }
  coeffs_ = coeffs / n;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-15) {
    if (angle == 0.0) return identity();
    throw std::invalid_argument("UnitQuaternion::from_axis_angle: zero axis");
  }
  return {std::cos(0.5 * angle), std::sin(0.5 * angle) * axis / n};
}

UnitQuaternion UnitQuaternion::conjugate() const {
  UnitQuaternion out = *this;
  out.coeffs_.tail<3>() = -coeffs_.tail<3>();
  return out;
}

UnitQuaternion UnitQuaternion::operator-() const {
  UnitQuaternion out = *this;
  out.coeffs_ = -coeffs_;
  return out;
}

Rotation Rotation::from_matrix(const Matrix3d& m, double tolerance) {
  if (!m.allFinite()) throw std::invalid_argument("Rotation: non-finite entries");
  const double ortho = (m.transpose() * m - Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (ortho > tolerance || std::abs(det - 1.0) > tolerance) {
    throw std::invalid_argument("Rotation: matrix is not orthonormal with det +1");
  }
  return Rotation(m);
}

Rotation Rotation::operator*(const Rotation& other) const { return Rotation(matrix_ * other.matrix_); }

Rotation Rotation::transpose() const { return Rotation(matrix_.transpose()); }

Matrix3d skew(const Vector3d& a) {
  Matrix3d s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

UnitQuaternion quat_product(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const double eta1 = q1.eta();
  const double eta2 = q2.eta();
  const Vector3d eps1 = q1.epsilon();
  const Vector3d eps2 = q2.epsilon();
  return {eta1 * eta2 - eps1.dot(eps2), eta1 * eps2 + eta2 * eps1 + eps1.cross(eps2)};
}

Matrix43d e_matrix(const UnitQuaternion& q) {
  Matrix43d e;
  e.row(0) = -q.epsilon().transpose();
  e.bottomRows<3>() = q.eta() * Matrix3d::Identity() - skew(q.epsilon());
  return e;
}

Vector4d quat_rate(const UnitQuaternion& q, const Vector3d& omega) {
  return 0.5 * e_matrix(q) * omega;
}

Vector3d omega_from_quat_rate(const UnitQuaternion& q, const Vector4d& qdot) {
  return 2.0 * e_matrix(q).transpose() * qdot;
}

Rotation quat_to_rotation(const UnitQuaternion& q) {
  const double eta = q.eta();
  const Vector3d eps = q.epsilon();
  // R = (eta^2 - eps^T eps) I + 2 eps eps^T + 2 eta S(eps); even in q.
  const Matrix3d r = (eta * eta - eps.squaredNorm()) * Matrix3d::Identity() +
                     2.0 * eps * eps.transpose() + 2.0 * eta * skew(eps);
  return Rotation(r);
}

UnitQuaternion rotation_to_quat(const Matrix3d& m) {
  const Rotation r = Rotation::from_matrix(m);
  const Matrix3d& a = r.matrix();
  // Shepperd's method: pick the largest of the four squared components.
  const double trace = a.trace();
  Vector4d q;
  if (trace >= a(0, 0) && trace >= a(1, 1) && trace >= a(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q << 0.25 * s, (a(2, 1) - a(1, 2)) / s, (a(0, 2) - a(2, 0)) / s, (a(1, 0) - a(0, 1)) / s;
  } else if (a(0, 0) >= a(1, 1) && a(0, 0) >= a(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + a(0, 0) - a(1, 1) - a(2, 2));
    q << (a(2, 1) - a(1, 2)) / s, 0.25 * s, (a(0, 1) + a(1, 0)) / s, (a(0, 2) + a(2, 0)) / s;
  } else if (a(1, 1) >= a(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 - a(0, 0) + a(1, 1) - a(2, 2));
    q << (a(0, 2) - a(2, 0)) / s, (a(0, 1) + a(1, 0)) / s, 0.25 * s, (a(1, 2) + a(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 - a(0, 0) - a(1, 1) + a(2, 2));
    q << (a(1, 0) - a(0, 1)) / s, (a(0, 2) + a(2, 0)) / s, (a(1, 2) + a(2, 1)) / s, 0.25 * s;
  }
  if (q[0] < 0.0) q = -q;
  return UnitQuaternion(q);
}

UnitQuaternion euler_to_quat(const EulerZYX& angles) {
  const UnitQuaternion qz = UnitQuaternion::from_axis_angle(Vector3d::UnitZ(), angles.yaw);
  const UnitQuaternion qy = UnitQuaternion::from_axis_angle(Vector3d::UnitY(), angles.pitch);
  const UnitQuaternion qx = UnitQuaternion::from_axis_angle(Vector3d::UnitX(), angles.roll);
  return qz * qy * qx;
}

EulerZYX quat_to_euler(const UnitQuaternion& q) {
  const Matrix3d r = quat_to_rotation(q).matrix();
  EulerZYX out;
  out.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  if (std::abs(r(2, 0)) < 1.0 - 1e-12) {
    out.yaw = std::atan2(r(1, 0), r(0, 0));
    out.roll = std::atan2(r(2, 1), r(2, 2));
  } else {
    // Gimbal lock: only yaw - roll (or yaw + roll) is defined; put it in yaw.
    out.roll = 0.0;
    out.yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return out;
}

UnitQuaternion integrate_quat(const UnitQuaternion& q, const Vector3d& omega, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_quat: dt must be positive");
  const double angle = omega.norm() * dt;
  if (angle == 0.0) return q;
  return UnitQuaternion::from_axis_angle(omega, angle) * q;
}

double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b) {
  const UnitQuaternion rel = b * a.conjugate();
  return 2.0 * std::atan2(rel.epsilon().norm(), std::abs(rel.eta()));
}

UnitQuaternion continue_sign(const UnitQuaternion& reference, const UnitQuaternion& q) {
  return reference.coeffs().dot(q.coeffs()) < 0.0 ? -q : q;
}

}  // namespace coop::spatial
