#include "coop/control.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace coop::control {

using spatial::skew;

namespace {

// J_O = I + N with N nilpotent (only the upper-right block), so J_O^-1 = 2I - J_O.
Matrix6d inverse_transpose(const Matrix6d& j_o) { return (2.0 * Matrix6d::Identity() - j_o).transpose(); }

}  // namespace

Matrix6d ControllerGains::k_matrix() const {
  Matrix6d k = Matrix6d::Zero();
  k.diagonal() << k_p, k_p, k_p, k_eps, k_eps, k_eps;
  return k;
}

void ControllerGains::validate(int agents_expected, ControllerMode mode) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(k_p > 0.0)) fail("k_p must be positive");
  if (!(k_eps > 0.0)) fail("k_eps must be positive");
  if (static_cast<int>(k_v.size()) != agents_expected) fail("k_v needs one entry per agent");
  if (static_cast<int>(load_sharing.size()) != agents_expected) fail("load_sharing needs one entry per agent");
  for (double k : k_v) {
    if (!(k >= 0.0)) fail("k_v entries must be non-negative");
  }
  for (double c : load_sharing) {
    if (!(c >= 0.0 && c <= 1.0)) fail("load-sharing coefficients must lie in [0, 1]");
  }
  const double sum = std::accumulate(load_sharing.begin(), load_sharing.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) fail("load-sharing sum must equal 1 (got " + std::to_string(sum) + ")");
  if (mode == ControllerMode::kAdaptive) {
    if (static_cast<int>(gamma.size()) != agents_expected) fail("gamma needs one entry per agent");
    for (double g : gamma) {
      if (!(g > 0.0)) fail("gamma entries must be positive");
    }
  }
}

ErrorState pose_errors(const ObjectState& state, const TrajectoryPoint& target) {
  ErrorState err;
  err.e_p = state.position - target.p;
  err.e_xi = target.xi * state.orientation.conjugate();
  err.e_p_dot = state.twist.linear - target.p_dot;
  err.e_omega = state.twist.angular - target.omega;
  err.e << err.e_p, -err.e_eta() * err.e_eps();
  return err;
}

ErrorRates error_rates(const ErrorState& err, const Vector3d& omega_d) {
  const double eta = err.e_eta();
  const Vector3d eps = err.e_eps();
  ErrorRates r;
  r.e_p_dot = err.e_p_dot;
  r.e_eta_dot = 0.5 * eps.dot(err.e_omega);
  r.e_eps_dot = -0.5 * (eta * Matrix3d::Identity() + skew(eps)) * err.e_omega - skew(eps) * omega_d;
  return r;
}

ReferenceSignals reference_velocity(const ErrorState& err, const TrajectoryPoint& target,
                                    const ControllerGains& gains) {
  const ErrorRates r = error_rates(err, target.omega);
  const double eta = err.e_eta();
  const Vector3d eps = err.e_eps();
  Vector6d e_dot;
  e_dot << r.e_p_dot, -(r.e_eta_dot * eps + eta * r.e_eps_dot);
  Matrix6d k = gains.k_matrix();
  if (gains.orientation_reference == OrientationReference::kFlipped) k.bottomRightCorner<3, 3>() *= -1.0;
  ReferenceSignals ref;
  ref.v = target.velocity() - k * err.e;
  ref.v_dot = target.acceleration() - k * e_dot;
  return ref;
}

Tracking evaluate_tracking(const ObjectState& state, const TrajectoryPoint& target, const ControllerGains& gains) {
  Tracking t;
  t.err = pose_errors(state, target);
  t.ref = reference_velocity(t.err, target, gains);
  t.err.e_v = state.twist.vector() - t.ref.v;
  return t;
}

Vector6d nonadaptive_agent_input(const AgentContext& agent, double k_v, double c, const ObjectModel& object,
                                 const ObjectState& object_state, const ErrorState& err,
                                 const ReferenceSignals& ref) {
  const DynamicsTerms& t = agent.task;
  const Matrix6d j_o_inv_t = inverse_transpose(agent.j_o);
  const DynamicsTerms obj = model::object_dynamics_terms(object, object_state);
  const Vector6d object_wrench = obj.mass * ref.v_dot + obj.coriolis * ref.v + obj.gravity;
  return t.gravity + (t.coriolis * agent.j_o + t.mass * agent.j_o_dot) * ref.v + t.mass * agent.j_o * ref.v_dot -
         j_o_inv_t * (k_v * err.e_v + c * err.e) + c * j_o_inv_t * object_wrench;
}

AgentRegressors agent_regressors(const AgentModel& agent, const AgentState& state, const AgentContext& context,
                                 const Vector3d& object_gravity, const ObjectState& object_state,
                                 const ReferenceSignals& ref) {
  AgentRegressors r;
  r.y = model::agent_regressor(agent, state.q, state.qdot, context.j_o, context.j_o_dot, ref.v, ref.v_dot);
  r.y_o = model::object_regressor(object_gravity, object_state, ref.v, ref.v_dot);
  return r;
}

Vector6d adaptive_agent_input(const AgentContext& agent, const AgentRegressors& regressors, double k_v, double c,
                              const ErrorState& err, const VectorXd& theta_hat, const Vector7d& theta_o_hat) {
  const Vector6d inner = regressors.y * theta_hat + c * (regressors.y_o * theta_o_hat) - c * err.e - k_v * err.e_v;
  return inverse_transpose(agent.j_o) * inner;
}

AdaptationRates adaptation_rates(const AgentRegressors& regressors, const Vector6d& e_v, double c, double gamma) {
  AdaptationRates r;
  r.theta_dot = -gamma * regressors.y.transpose() * e_v;
  r.theta_o_dot = -c * regressors.y_o.transpose() * e_v;
  return r;
}

std::vector<Vector6d> internal_force_command(const std::vector<GraspOffset>& offsets,
                                             const UnitQuaternion& object_orientation, const VectorXd& f_hat) {
  const int n = static_cast<int>(offsets.size());
  if (f_hat.size() != 6 * n) throw std::invalid_argument("internal_force_command: f_hat must have 6N entries");
  const Matrix3d r = spatial::quat_to_rotation(object_orientation).matrix();
  std::vector<Vector3d> p_oe(n);
  VectorXd f_world(6 * n);
  for (int i = 0; i < n; ++i) {
    p_oe[i] = -(r * offsets[i].position);
    f_world.segment<3>(6 * i) = r * f_hat.segment<3>(6 * i);
    f_world.segment<3>(6 * i + 3) = r * f_hat.segment<3>(6 * i + 3);
  }
  const VectorXd projected = coupling::internal_force_projector(p_oe) * f_world;
  std::vector<Vector6d> out(n);
  for (int i = 0; i < n; ++i) out[i] = projected.segment<6>(6 * i);
  return out;
}

VectorXd joint_torques(const AgentModel& agent, const VectorXd& q, const Vector6d& u) {
  return model::geometric_jacobian(agent, q).transpose() * u;
}

AgentController::AgentController(int index, AgentModel agent, std::vector<GraspOffset> offsets, ObjectModel object,
                                 ControllerGains gains, ControllerMode mode, VectorXd f_internal_hat)
    : index_(index),
      agent_(std::move(agent)),
      offsets_(std::move(offsets)),
      object_(std::move(object)),
      gains_(std::move(gains)),
      mode_(mode),
      f_internal_hat_(std::move(f_internal_hat)) {
  if (index_ < 0 || index_ >= static_cast<int>(offsets_.size())) {
    throw std::invalid_argument("AgentController: index out of range");
  }
  if (f_internal_hat_.size() != 0 && f_internal_hat_.size() != 6 * static_cast<long>(offsets_.size())) {
    throw std::invalid_argument("AgentController: internal force must have 6N entries");
  }
}

AgentCommand AgentController::compute(const AgentState& own, const TrajectoryPoint& target,
                                      const VectorXd* theta_hat, const Vector7d* theta_o_hat) const {
  const GraspOffset& offset = offsets_[index_];
  const model::Pose effector = model::forward_kinematics(agent_, own.q);
  const Matrix6d j = model::geometric_jacobian(agent_, own.q);
  const Vector6d v_i = j * own.qdot;

  AgentCommand cmd;
  ObjectState& obj = cmd.object_estimate;
  obj.orientation = effector.orientation * offset.orientation.conjugate();
  const Vector3d p_oe = -(spatial::quat_to_rotation(obj.orientation) * offset.position);
  obj.position = effector.position + p_oe;

  AgentContext ctx;
  ctx.j_o = coupling::object_agent_jacobian(p_oe);
  obj.twist = spatial::Twist::from_vector(coupling::object_agent_jacobian_inverse(p_oe) * v_i);
  ctx.j_o_dot = coupling::object_agent_jacobian_dot(obj.twist.angular.cross(p_oe));
  ctx.task = model::task_space_dynamics(agent_, own.q, own.qdot);

  cmd.tracking = evaluate_tracking(obj, target, gains_);
  const double k_v = gains_.k_v[index_];
  const double c = gains_.load_sharing[index_];
  if (mode_ == ControllerMode::kNonAdaptive) {
    cmd.u = nonadaptive_agent_input(ctx, k_v, c, object_, obj, cmd.tracking.err, cmd.tracking.ref);
  } else {
    if (theta_hat == nullptr || theta_o_hat == nullptr) {
      throw std::invalid_argument("AgentController: adaptive mode needs parameter estimates");
    }
    const AgentRegressors reg = agent_regressors(agent_, own, ctx, object_.gravity, obj, cmd.tracking.ref);
    cmd.u = adaptive_agent_input(ctx, reg, k_v, c, cmd.tracking.err, *theta_hat, *theta_o_hat);
    cmd.rates = adaptation_rates(reg, cmd.tracking.err.e_v, c, gains_.gamma[index_]);
  }
  if (f_internal_hat_.size() != 0) {
    cmd.u_internal = internal_force_command(offsets_, obj.orientation, f_internal_hat_)[index_];
    cmd.u += cmd.u_internal;
  }
  cmd.tau = j.transpose() * cmd.u;
  return cmd;
}

double orientation_term(const ErrorState& err, OrientationTerm term) {
  const double eta = err.e_eta();
  const double eps2 = err.e_eps().squaredNorm();
  switch (term) {
    case OrientationTerm::kEpsilonNormSquared:
      return 1.0 - eta * eta;
    case OrientationTerm::kUnitConstraintResidual:
      return eta * eta - 1.0 + eps2;
    case OrientationTerm::kEtaSquaredMinusOne:
      return eta * eta - 1.0;
  }
  return 0.0;
}

double lyapunov_value(const ErrorState& err, const Matrix6d& coupled_mass, OrientationTerm term) {
  return 0.5 * err.e_p.squaredNorm() + orientation_term(err, term) + 0.5 * err.e_v.dot(coupled_mass * err.e_v);
}

double lyapunov_value(const ErrorState& err, const Matrix6d& coupled_mass, const ParameterErrors& params,
                      OrientationTerm term) {
  double v = lyapunov_value(err, coupled_mass, term);
  for (std::size_t i = 0; i < params.e_theta.size(); ++i) {
    v += 0.5 / params.gamma.at(i) * params.e_theta[i].squaredNorm();
  }
  for (const Vector7d& e : params.e_theta_o) v += 0.5 * e.squaredNorm();
  return v;
}

double lyapunov_rate(const ErrorState& err, const ControllerGains& gains, EtaPower power) {
  const double eta = err.e_eta();
  const double eta_factor = power == EtaPower::kSquared ? eta * eta : eta;
  double k_v_sum = 0.0;
  for (double k : gains.k_v) k_v_sum += k;
  return -gains.k_p * err.e_p.squaredNorm() - gains.k_eps * eta_factor * err.e_eps().squaredNorm() -
         k_v_sum * err.e_v.squaredNorm();
}

}  // namespace coop::control
