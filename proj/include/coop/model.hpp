#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coop/spatial_algebra.hpp"

namespace coop::model {

using spatial::Twist;
using spatial::UnitQuaternion;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Vector7d = Eigen::Matrix<double, 7, 1>;
using Vector10d = Eigen::Matrix<double, 10, 1>;
using Matrix67d = Eigen::Matrix<double, 6, 7>;

inline const Vector3d kDefaultGravity{0.0, 0.0, -9.81};

// Jacobians above this condition number are reported as near-singular.
inline constexpr double kNearSingularCondition = 1e6;
// Jacobians above this condition number are refused for inversion.
inline constexpr double kSingularCondition = 1e8;

// Rigid-body inertial parameters expressed about the body frame origin, in
// body coordinates. The dynamics are linear in the stacked vector
// [mass, first_moment (3), Ixx, Iyy, Izz, Ixy, Ixz, Iyz]. Products of
// inertia are the off-diagonal tensor entries, not their negatives.
struct InertialParams {
  static constexpr int kSize = 10;

  double mass = 0.0;
  Vector3d first_moment = Vector3d::Zero();  // mass * center-of-mass offset
  Vector6d inertia_sym = Vector6d::Zero();

  // From a center-of-mass description; applies the parallel-axis shift.
  static InertialParams from_com(double mass, const Vector3d& com, const Matrix3d& inertia_about_com);
  static InertialParams from_vector(const Vector10d& theta);

  Vector10d to_vector() const;
  Matrix3d inertia() const;
  Matrix3d inertia_about_com() const;

  // Throws std::invalid_argument naming `what` unless mass > 0 and the
  // inertia about the center of mass is positive definite and satisfies
  // the triangle inequalities.
  void validate(std::string_view what) const;
};

Matrix3d inertia_from_sym(const Vector6d& sym);

// 6x6 spatial inertia about the frame origin, in world-aligned axes, for a
// body whose orientation is `rotation`. Ordering is (linear, angular).
Matrix6d spatial_inertia(const InertialParams& params, const Matrix3d& rotation);

struct Pose {
  Vector3d position = Vector3d::Zero();
  UnitQuaternion orientation;
};

// Object frame sits at the center of mass, so the first moment vanishes and
// seven parameters remain: [mass, Ixx, Iyy, Izz, Ixy, Ixz, Iyz].
struct ObjectModel {
  static constexpr int kParameterCount = 7;

  double mass = 1.0;
  Vector6d inertia_sym = Vector6d::Zero();
  Vector3d gravity = kDefaultGravity;

  Vector7d parameters() const;
  static ObjectModel from_parameters(const Vector7d& theta, const Vector3d& gravity);
  InertialParams inertial() const;
  void validate() const;
};

struct ObjectState {
  Vector3d position = Vector3d::Zero();
  UnitQuaternion orientation;
  Twist twist;
};

struct RevoluteJoint {
  Pose origin;                         // joint frame in the parent link frame
  Vector3d axis = Vector3d::UnitZ();   // in the joint frame
  InertialParams link;                 // child link, about the joint frame origin
};

struct SerialChain {
  Pose base;
  std::vector<RevoluteJoint> joints;
  Pose tool;  // end-effector frame in the last link frame
};

struct TaskSpaceBody {
  InertialParams params;  // about the end-effector frame origin
};

// One agent. A serial chain has six revolute joints and is described in
// joint coordinates. A task-space body is a free rigid body whose
// configuration is its end-effector pose, stored as [p; eta; eps], and whose
// velocity is its world twist, so its geometric Jacobian is the identity.
class AgentModel {
 public:
  enum class Kind { kSerialChain, kTaskSpaceBody };
  static constexpr int kChainJoints = 6;

  static AgentModel serial_chain(SerialChain chain, const Vector3d& gravity = kDefaultGravity);
  static AgentModel task_space_body(TaskSpaceBody body, const Vector3d& gravity = kDefaultGravity);

  Kind kind() const { return kind_; }
  const SerialChain& chain() const { return chain_; }
  const TaskSpaceBody& body() const { return body_; }
  const Vector3d& gravity() const { return gravity_; }

  int configuration_dim() const { return kind_ == Kind::kSerialChain ? kChainJoints : 7; }
  int velocity_dim() const { return 6; }
  int parameter_count() const;

  VectorXd parameters() const;
  AgentModel with_parameters(const VectorXd& theta) const;

  // Checks the joint count and every inertial block; throws std::invalid_argument.
  void validate() const;

 private:
  AgentModel() = default;
  Kind kind_ = Kind::kTaskSpaceBody;
  SerialChain chain_;
  TaskSpaceBody body_;
  Vector3d gravity_ = kDefaultGravity;
};

// A configuration for `agent` at `pose` when it is a task-space body.
VectorXd body_configuration(const Pose& pose);

Pose forward_kinematics(const AgentModel& agent, const VectorXd& q);
Matrix6d geometric_jacobian(const AgentModel& agent, const VectorXd& q);
Matrix6d geometric_jacobian_derivative(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot);
double condition_number(const Matrix6d& m);

// Time derivative of the configuration vector for velocity `qdot`.
VectorXd configuration_rate(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot);
// Renormalizes the quaternion part of a task-space body configuration.
void normalize_configuration(const AgentModel& agent, VectorXd& q);

// Damped least-squares inverse kinematics. Throws std::runtime_error if the
// pose error does not drop below `tolerance`.
VectorXd inverse_kinematics(const AgentModel& agent, const Pose& target, const VectorXd& seed,
                            double tolerance = 1e-12, int max_iterations = 200);

struct DynamicsTerms {
  Matrix6d mass = Matrix6d::Zero();
  Matrix6d coriolis = Matrix6d::Zero();
  Vector6d gravity = Vector6d::Zero();
};

// M_q, C_q (Christoffel construction) and g_q in joint coordinates. For a
// task-space body this equals the task-space terms.
DynamicsTerms joint_space_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot);
// dM_q/dt along qdot.
Matrix6d joint_space_mass_rate(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot);

// Gravitational potential energy of all links (serial chain) or the body,
// zero at the world origin.
double potential_energy(const AgentModel& agent, const VectorXd& q);

// Recursive Newton-Euler inverse dynamics: tau = M_q qddot + C_q qdot + g_q.
VectorXd inverse_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                          const VectorXd& qddot);

// M_i, C_i, g_i in end-effector coordinates (world-aligned twist of the
// end-effector frame origin). Throws SingularityError if cond(J_i) exceeds
// kSingularCondition.
DynamicsTerms task_space_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot);

// M_O, C_O = blockdiag(0, S(omega) I_w), g_O = (-m gravity, 0).
DynamicsTerms object_dynamics_terms(const ObjectModel& object, const ObjectState& state);

// Y_O with Y_O theta_O = M_O vdot + C_O v + g_O, C_O evaluated at the
// state's own twist.
Matrix67d object_regressor(const Vector3d& gravity, const ObjectState& state, const Vector6d& v,
                           const Vector6d& vdot);

// H_i with H_i theta_i = M_i vdot_i + C_i v_i + g_i at (q, qdot).
MatrixXd agent_task_regressor(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                              const Vector6d& v_i, const Vector6d& vdot_i);

// Y_i with Y_i theta_i = J_O^T M_i J_O vdot + (J_O^T M_i Jdot_O + J_O^T C_i J_O) v + J_O^T g_i.
MatrixXd agent_regressor(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                         const Matrix6d& object_jacobian, const Matrix6d& object_jacobian_dot,
                         const Vector6d& v, const Vector6d& vdot);

}  // namespace coop::model
