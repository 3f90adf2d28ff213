#pragma once

#include <vector>

#include "coop/coupling.hpp"
#include "coop/model.hpp"
#include "coop/trajectory.hpp"

namespace coop::control {

using coupling::AgentState;
using coupling::GraspOffset;
using model::AgentModel;
using model::DynamicsTerms;
using model::Matrix67d;
using model::MatrixXd;
using model::ObjectModel;
using model::ObjectState;
using model::Vector7d;
using model::VectorXd;

enum class ControllerMode { kNonAdaptive, kAdaptive };

// Orientation component of the reference velocity. kStandard is
// omega_d + k_eps e_eta e_eps, i.e. v_r = v_d - K e. kFlipped uses the
// opposite sign and exists only to demonstrate that it does not converge.
enum class OrientationReference { kStandard, kFlipped };

struct ControllerGains {
  double k_p = 1.0;
  double k_eps = 1.0;
  std::vector<double> k_v;
  std::vector<double> load_sharing;  // c_i
  std::vector<double> gamma;         // adaptation gains, adaptive mode only
  OrientationReference orientation_reference = OrientationReference::kStandard;

  int agents() const { return static_cast<int>(k_v.size()); }
  // K = diag(k_p I, k_eps I).
  Matrix6d k_matrix() const;
  // Throws std::invalid_argument unless k_p, k_eps, gamma > 0, k_v >= 0,
  // 0 <= c_i <= 1, sum c = 1 within 1e-12 and vector lengths equal `agents`.
  // Zero k_v is allowed for feedforward checks; scenarios require k_v > 0.
  void validate(int agents, ControllerMode mode) const;
};

struct ErrorState {
  Vector3d e_p = Vector3d::Zero();       // p_O - p_d
  UnitQuaternion e_xi;                   // xi_d (x) xi_O^*
  Vector3d e_p_dot = Vector3d::Zero();   // pdot_O - pdot_d
  Vector3d e_omega = Vector3d::Zero();   // omega_O - omega_d
  Vector6d e = Vector6d::Zero();         // [e_p; -e_eta e_eps]
  Vector6d e_v = Vector6d::Zero();       // v_O - v_r

  double e_eta() const { return e_xi.eta(); }
  Vector3d e_eps() const { return e_xi.epsilon(); }
};

// Everything except e_v, which needs the reference velocity.
ErrorState pose_errors(const ObjectState& state, const TrajectoryPoint& target);

struct ErrorRates {
  Vector3d e_p_dot = Vector3d::Zero();
  double e_eta_dot = 0.0;
  Vector3d e_eps_dot = Vector3d::Zero();
};

// e_eta' = 1/2 e_eps^T e_omega,
// e_eps' = -1/2 (e_eta I + S(e_eps)) e_omega - S(e_eps) omega_d.
ErrorRates error_rates(const ErrorState& err, const Vector3d& omega_d);

struct ReferenceSignals {
  Vector6d v = Vector6d::Zero();
  Vector6d v_dot = Vector6d::Zero();
};

ReferenceSignals reference_velocity(const ErrorState& err, const TrajectoryPoint& target,
                                    const ControllerGains& gains);

// pose_errors + reference_velocity + e_v in one call.
struct Tracking {
  ErrorState err;
  ReferenceSignals ref;
};
Tracking evaluate_tracking(const ObjectState& state, const TrajectoryPoint& target, const ControllerGains& gains);

// Agent i's own kinematic and dynamic quantities at one instant.
struct AgentContext {
  Matrix6d j_o = Matrix6d::Identity();
  Matrix6d j_o_dot = Matrix6d::Zero();
  DynamicsTerms task;
};

// u_i = g_i + (C_i J_O + M_i Jdot_O) v_r + M_i J_O vdot_r - J_O^-T (k_v e_v + c e)
//       + c J_O^-T (M_O vdot_r + C_O v_r + g_O).
Vector6d nonadaptive_agent_input(const AgentContext& agent, double k_v, double c, const ObjectModel& object,
                                 const ObjectState& object_state, const ErrorState& err,
                                 const ReferenceSignals& ref);

// Y_i and Y_O evaluated at the reference signals.
struct AgentRegressors {
  MatrixXd y;
  Matrix67d y_o = Matrix67d::Zero();
};

AgentRegressors agent_regressors(const AgentModel& agent, const AgentState& state, const AgentContext& context,
                                 const Vector3d& object_gravity, const ObjectState& object_state,
                                 const ReferenceSignals& ref);

// u_i = J_O^-T (Y_i theta_i + c Y_O theta_O - c e - k_v e_v).
Vector6d adaptive_agent_input(const AgentContext& agent, const AgentRegressors& regressors, double k_v, double c,
                              const ErrorState& err, const VectorXd& theta_hat, const Vector7d& theta_o_hat);

struct AdaptationRates {
  VectorXd theta_dot;
  Vector7d theta_o_dot = Vector7d::Zero();
};

// theta_O' = -c Y_O^T e_v, theta' = -gamma Y_i^T e_v.
AdaptationRates adaptation_rates(const AgentRegressors& regressors, const Vector6d& e_v, double c, double gamma);

// Per-agent internal wrench P f_hat, where f_hat holds each agent's desired
// wrench in the object frame and is rotated to the world with R_O before
// projection. Throws std::invalid_argument on a size mismatch.
std::vector<Vector6d> internal_force_command(const std::vector<GraspOffset>& offsets,
                                             const UnitQuaternion& object_orientation, const VectorXd& f_hat);

// tau_i = J_i^T u_i.
VectorXd joint_torques(const AgentModel& agent, const VectorXd& q, const Vector6d& u);

struct AdaptiveState {
  std::vector<VectorXd> theta_hat;    // per agent
  std::vector<Vector7d> theta_o_hat;  // per agent's copy of the object parameters
};

// Output of one agent's controller.
struct AgentCommand {
  Vector6d u = Vector6d::Zero();
  Vector6d u_internal = Vector6d::Zero();  // internal-force part of u
  VectorXd tau;
  ObjectState object_estimate;  // from the agent's own kinematics
  Tracking tracking;
  AdaptationRates rates;        // adaptive mode only
};

// Decentralized controller of agent i. It is built from off-line constants
// (its own model, its grasp offset, the object model and the shared gains)
// and, at run time, reads only its own joint state and the desired
// trajectory. The object pose and twist are reconstructed from its own
// forward and differential kinematics.
class AgentController {
 public:
  AgentController(int index, AgentModel agent, std::vector<GraspOffset> offsets, ObjectModel object,
                  ControllerGains gains, ControllerMode mode, VectorXd f_internal_hat = {});

  AgentCommand compute(const AgentState& own, const TrajectoryPoint& target, const VectorXd* theta_hat = nullptr,
                       const Vector7d* theta_o_hat = nullptr) const;

  int index() const { return index_; }
  ControllerMode mode() const { return mode_; }

 private:
  int index_;
  AgentModel agent_;
  std::vector<GraspOffset> offsets_;  // all offsets: the internal-force projector needs them
  ObjectModel object_;
  ControllerGains gains_;
  ControllerMode mode_;
  VectorXd f_internal_hat_;
};

// Orientation term of the Lyapunov function. kEpsilonNormSquared uses
// 1 - e_eta^2 = |e_eps|^2, which vanishes exactly at e_eta = +-1.
// kUnitConstraintResidual (e_eta^2 - 1 + |e_eps|^2) and
// kEtaSquaredMinusOne (e_eta^2 - 1) are the alternative printed forms and
// are kept for reporting; the first is identically zero on unit
// quaternions and the second is non-positive.
enum class OrientationTerm { kEpsilonNormSquared, kUnitConstraintResidual, kEtaSquaredMinusOne };

double orientation_term(const ErrorState& err, OrientationTerm term);

// V = 1/2 |e_p|^2 + orientation term + 1/2 e_v^T M~ e_v.
double lyapunov_value(const ErrorState& err, const Matrix6d& coupled_mass,
                      OrientationTerm term = OrientationTerm::kEpsilonNormSquared);

struct ParameterErrors {
  std::vector<VectorXd> e_theta;    // theta_i - theta_hat_i
  std::vector<Vector7d> e_theta_o;  // theta_O - theta_hat_O^i
  std::vector<double> gamma;
};

// Adds sum 1/(2 gamma_i) |e_theta_i|^2 + 1/2 |e_theta_O^i|^2.
double lyapunov_value(const ErrorState& err, const Matrix6d& coupled_mass, const ParameterErrors& params,
                      OrientationTerm term = OrientationTerm::kEpsilonNormSquared);

enum class EtaPower { kSquared, kLinear };

// -k_p |e_p|^2 - k_eps e_eta^p |e_eps|^2 - sum k_v |e_v|^2 with p = 2 or 1.
double lyapunov_rate(const ErrorState& err, const ControllerGains& gains, EtaPower power = EtaPower::kSquared);

}  // namespace coop::control
