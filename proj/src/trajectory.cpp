#include "coop/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coop::control {

Vector6d TrajectoryPoint::velocity() const {
  Vector6d v;
  v << p_dot, omega;
  return v;
}

Vector6d TrajectoryPoint::acceleration() const {
  Vector6d a;
  a << p_ddot, omega_dot;
  return a;
}

ConstantTrajectory::ConstantTrajectory(const Vector3d& position, const UnitQuaternion& orientation)
    : position_(position), orientation_(orientation) {}

TrajectoryPoint ConstantTrajectory::at(double) const {
  TrajectoryPoint pt;
  pt.p = position_;
  pt.xi = orientation_;
  return pt;
}

SinusoidTrajectory::SinusoidTrajectory(const SinusoidParams& params) : params_(params) {
  if ((params.period.array() <= 0.0).any() || params.angle_period <= 0.0) {
    throw std::invalid_argument("sinusoid trajectory: periods must be positive");
  }
  if (params.axis.norm() < 1e-12) throw std::invalid_argument("sinusoid trajectory: zero rotation axis");
  params_.axis.normalize();
}

TrajectoryPoint SinusoidTrajectory::at(double t) const {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const SinusoidParams& s = params_;
  TrajectoryPoint pt;
  for (int k = 0; k < 3; ++k) {
    const double w = kTwoPi / s.period[k];
    const double arg = w * t + s.phase[k];
    pt.p[k] = s.center[k] + s.amplitude[k] * std::sin(arg);
    pt.p_dot[k] = s.amplitude[k] * w * std::cos(arg);
    pt.p_ddot[k] = -s.amplitude[k] * w * w * std::sin(arg);
  }
  const double w = kTwoPi / s.angle_period;
  const double arg = w * t + s.angle_phase;
  const double angle = s.angle_offset + s.angle_amplitude * std::sin(arg);
  pt.xi = UnitQuaternion(std::cos(0.5 * angle), std::sin(0.5 * angle) * s.axis) * s.base;
  pt.omega = s.axis * (s.angle_amplitude * w * std::cos(arg));
  pt.omega_dot = s.axis * (-s.angle_amplitude * w * w * std::sin(arg));
  return pt;
}

CubicSpline::CubicSpline(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)), m_(t_.size(), 0.0) {
  const std::size_t n = t_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("spline: need at least two samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t_[i] > t_[i - 1])) throw std::invalid_argument("spline: sample times must increase strictly");
  }
  if (n == 2) return;
  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  const std::size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t_[i] - t_[i - 1];
    const double h1 = t_[i + 1] - t_[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < k; ++i) {
    const double lower = t_[i + 1] - t_[i];  // h_{i} below the diagonal
    const double f = lower / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i >= 1; --i) m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
}

Vector3d CubicSpline::eval(double t) const {
  t = std::clamp(t, t_.front(), t_.back());
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(t_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, t_.size() - 1) - 1;
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  const double value = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  const double d1 = (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h / 6.0 * m_[i] + (3.0 * b * b - 1.0) * h / 6.0 * m_[i + 1];
  const double d2 = a * m_[i] + b * m_[i + 1];
  return {value, d1, d2};
}

TableTrajectory::TableTrajectory(std::vector<double> times, std::vector<Vector3d> positions,
                                 std::vector<UnitQuaternion> orientations)
    : times_(std::move(times)), positions_(std::move(positions)), orientations_(std::move(orientations)) {
  if (times_.size() < 2 || positions_.size() != times_.size() || orientations_.size() != times_.size()) {
    throw std::invalid_argument("table trajectory: need at least two samples of equal length");
  }
  for (std::size_t i = 1; i < orientations_.size(); ++i) {
    orientations_[i] = spatial::continue_sign(orientations_[i - 1], orientations_[i]);
  }
  for (int k = 0; k < 3; ++k) {
    std::vector<double> y(times_.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = positions_[i][k];
    p_splines_.emplace_back(times_, y);
  }
  for (int k = 0; k < 4; ++k) {
    std::vector<double> y(times_.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = orientations_[i].coeffs()[k];
    q_splines_.emplace_back(times_, y);
  }
}

TrajectoryPoint TableTrajectory::at(double t) const {
  TrajectoryPoint pt;
  for (int k = 0; k < 3; ++k) {
    const Vector3d s = p_splines_[k].eval(t);
    pt.p[k] = s[0];
    pt.p_dot[k] = s[1];
    pt.p_ddot[k] = s[2];
  }
  Vector4d s, s_dot, s_ddot;
  for (int k = 0; k < 4; ++k) {
    const Vector3d v = q_splines_[k].eval(t);
    s[k] = v[0];
    s_dot[k] = v[1];
    s_ddot[k] = v[2];
  }
  // u = s / |s| and its first two derivatives.
  const double n = s.norm();
  const Vector4d u = s / n;
  const double n_dot = u.dot(s_dot);
  const Vector4d u_dot = (s_dot - u * n_dot) / n;
  const Vector4d u_ddot = (s_ddot - u_dot * n_dot - u * (u_dot.dot(s_dot) + u.dot(s_ddot))) / n - u_dot * (n_dot / n);
  pt.xi = UnitQuaternion(u);
  Matrix43d e;
  e.row(0) = -u.tail<3>().transpose();
  e.bottomRows<3>() = u[0] * Matrix3d::Identity() - spatial::skew(u.tail<3>());
  pt.omega = 2.0 * e.transpose() * u_dot;
  // d/dt(E(u))^T u_dot vanishes identically, leaving 2 E^T u_ddot.
  pt.omega_dot = 2.0 * e.transpose() * u_ddot;
  return pt;
}

}  // namespace coop::control
