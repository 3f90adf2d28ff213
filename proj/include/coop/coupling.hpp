#pragma once

#include <vector>

#include "coop/model.hpp"
#include "coop/spatial_algebra.hpp"

namespace coop::coupling {

using model::AgentModel;
using model::DynamicsTerms;
using model::MatrixXd;
using model::ObjectModel;
using model::ObjectState;
using model::Pose;
using model::VectorXd;
using spatial::UnitQuaternion;

// Constant rigid offset of end-effector {E_i} from object frame {O}, both
// expressed in {O}: p_Ei = p_O + R_O position, R_Ei = R_O R(orientation).
struct GraspOffset {
  Vector3d position = Vector3d::Zero();
  UnitQuaternion orientation;
};

struct GraspGeometry {
  std::vector<GraspOffset> offsets;

  int size() const { return static_cast<int>(offsets.size()); }

  Pose effector_pose(int i, const Pose& object) const;
  // Object pose implied by agent i's end-effector pose.
  Pose object_pose(int i, const Pose& effector) const;
  // p_{O/E_i} = p_O - p_Ei in world coordinates.
  Vector3d object_to_effector(int i, const UnitQuaternion& object_orientation) const;
  std::vector<Vector3d> object_to_effector_all(const UnitQuaternion& object_orientation) const;
};

// J_Oi = [[I, S(p)], [0, I]] with p = p_{O/E_i}; maps the object twist to
// the end-effector twist.
Matrix6d object_agent_jacobian(const Vector3d& p_oe);
// Closed form: upper-right block -S(p).
Matrix6d object_agent_jacobian_inverse(const Vector3d& p_oe);
// Time derivative given dp_{O/E_i}/dt (= omega_O x p_{O/E_i} for a rigid grasp).
Matrix6d object_agent_jacobian_dot(const Vector3d& p_oe_rate);

struct GraspMatrices {
  MatrixXd g;        // 6N x 6, stacked J_Oi
  MatrixXd g_tilde;  // 6N x 6N, blockdiag(J_Oi^-1)
  MatrixXd g_star;   // 6N x 6, (1/N) [J_O1^-1, ..., J_ON^-1]^T
};

// Throws std::invalid_argument for an empty list.
GraspMatrices grasp_matrices(const std::vector<Vector3d>& p_oe);

// P = I - G* G^T. Its range is the internal-wrench subspace null(G^T).
MatrixXd internal_force_projector(const std::vector<Vector3d>& p_oe);

struct AgentState {
  VectorXd q;
  VectorXd qdot;
};

// Per-agent quantities at one instant.
struct AgentCoupling {
  Vector3d p_oe = Vector3d::Zero();
  Matrix6d j_o = Matrix6d::Identity();
  Matrix6d j_o_dot = Matrix6d::Zero();
  DynamicsTerms task;  // M_i, C_i, g_i
};

struct CoupledTerms {
  Matrix6d mass = Matrix6d::Zero();
  Matrix6d coriolis = Matrix6d::Zero();
  Vector6d gravity = Vector6d::Zero();
  std::vector<AgentCoupling> agents;
};

// M~ = M_O + sum J^T M J, C~ = C_O + sum (J^T C J + J^T M Jdot),
// g~ = g_O + sum J^T g. Offsets are taken from the object pose. Throws
// SingularityError if an agent Jacobian is singular.
CoupledTerms coupled_terms(const ObjectModel& object, const ObjectState& state,
                           const std::vector<AgentModel>& agents, const std::vector<AgentState>& agent_states,
                           const GraspGeometry& grasp);

// f_i = u_i - M_i vdot_i - C_i v_i - g_i with v_i = J_i qdot_i.
std::vector<Vector6d> contact_wrenches(const std::vector<AgentModel>& agents,
                                       const std::vector<AgentState>& agent_states,
                                       const std::vector<Vector6d>& u, const std::vector<Vector6d>& vdot_i);

// Same, reusing task-space terms already evaluated.
std::vector<Vector6d> contact_wrenches(const CoupledTerms& coupled, const std::vector<Vector6d>& v_i,
                                       const std::vector<Vector6d>& u, const std::vector<Vector6d>& vdot_i);

}  // namespace coop::coupling
