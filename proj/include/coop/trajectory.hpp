#pragma once

#include <memory>
#include <string>
#include <vector>

#include "coop/spatial_algebra.hpp"

namespace coop::control {

using spatial::UnitQuaternion;

// Desired object pose with analytic first and second derivatives.
struct TrajectoryPoint {
  Vector3d p = Vector3d::Zero();
  Vector3d p_dot = Vector3d::Zero();
  Vector3d p_ddot = Vector3d::Zero();
  UnitQuaternion xi;
  Vector3d omega = Vector3d::Zero();      // world frame
  Vector3d omega_dot = Vector3d::Zero();

  Vector6d velocity() const;
  Vector6d acceleration() const;
};

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual TrajectoryPoint at(double t) const = 0;
  virtual std::string family() const = 0;
};

class ConstantTrajectory final : public Trajectory {
 public:
  ConstantTrajectory(const Vector3d& position, const UnitQuaternion& orientation);
  TrajectoryPoint at(double t) const override;
  std::string family() const override { return "constant"; }

  const Vector3d& position() const { return position_; }
  const UnitQuaternion& orientation() const { return orientation_; }

 private:
  Vector3d position_;
  UnitQuaternion orientation_;
};

// p_d(t)_k = center_k + amplitude_k sin(2 pi t / period_k + phase_k).
// xi_d(t) = exp(axis * angle(t) / 2) (x) base with
// angle(t) = angle_offset + angle_amplitude sin(2 pi t / angle_period + angle_phase),
// so omega_d = axis * d(angle)/dt.
struct SinusoidParams {
  Vector3d center = Vector3d::Zero();
  Vector3d amplitude = Vector3d::Zero();
  Vector3d period = Vector3d::Ones();
  Vector3d phase = Vector3d::Zero();
  UnitQuaternion base;
  Vector3d axis = Vector3d::UnitZ();
  double angle_offset = 0.0;
  double angle_amplitude = 0.0;
  double angle_period = 1.0;
  double angle_phase = 0.0;
};

class SinusoidTrajectory final : public Trajectory {
 public:
  // Throws std::invalid_argument for non-positive periods or a zero axis.
  explicit SinusoidTrajectory(const SinusoidParams& params);
  TrajectoryPoint at(double t) const override;
  std::string family() const override { return "sinusoid"; }
  const SinusoidParams& params() const { return params_; }

 private:
  SinusoidParams params_;
};

// Natural cubic spline (zero second derivative at both ends) through samples.
// Outside [front, back] the spline is evaluated at the clamped time, so the
// pose holds and its derivatives are those of the end knot.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> t, std::vector<double> y);
  // Value, first and second derivative.
  Vector3d eval(double t) const;

 private:
  std::vector<double> t_, y_, m_;  // m_: second derivatives at knots
};

// Sampled pose table. Positions are splined per component; quaternion
// components are splined after sign continuation and renormalized, with
// derivatives of the normalization taken analytically.
class TableTrajectory final : public Trajectory {
 public:
  // Throws std::invalid_argument unless there are at least two samples with
  // strictly increasing times.
  TableTrajectory(std::vector<double> times, std::vector<Vector3d> positions,
                  std::vector<UnitQuaternion> orientations);
  TrajectoryPoint at(double t) const override;
  std::string family() const override { return "table"; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector3d>& positions() const { return positions_; }
  const std::vector<UnitQuaternion>& orientations() const { return orientations_; }

 private:
  std::vector<double> times_;
  std::vector<Vector3d> positions_;
  std::vector<UnitQuaternion> orientations_;
  std::vector<CubicSpline> p_splines_;
  std::vector<CubicSpline> q_splines_;
};

}  // namespace coop::control
