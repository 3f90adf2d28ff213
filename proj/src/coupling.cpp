#include "coop/coupling.hpp"

#include <stdexcept>

namespace coop::coupling {

using spatial::quat_to_rotation;
using spatial::skew;

Pose GraspGeometry::effector_pose(int i, const Pose& object) const {
  const GraspOffset& o = offsets.at(i);
  return {object.position + quat_to_rotation(object.orientation) * o.position, object.orientation * o.orientation};
}

Pose GraspGeometry::object_pose(int i, const Pose& effector) const {
  const GraspOffset& o = offsets.at(i);
  const UnitQuaternion xi_o = effector.orientation * o.orientation.conjugate();
  return {effector.position - quat_to_rotation(xi_o) * o.position, xi_o};
}

Vector3d GraspGeometry::object_to_effector(int i, const UnitQuaternion& object_orientation) const {
  return -(quat_to_rotation(object_orientation) * offsets.at(i).position);
}

std::vector<Vector3d> GraspGeometry::object_to_effector_all(const UnitQuaternion& object_orientation) const {
  std::vector<Vector3d> out;
  out.reserve(offsets.size());
  for (int i = 0; i < size(); ++i) out.push_back(object_to_effector(i, object_orientation));
  return out;
}

Matrix6d object_agent_jacobian(const Vector3d& p_oe) {
  Matrix6d j = Matrix6d::Identity();
  j.topRightCorner<3, 3>() = skew(p_oe);
  return j;
}

Matrix6d object_agent_jacobian_inverse(const Vector3d& p_oe) { return object_agent_jacobian(-p_oe); }

Matrix6d object_agent_jacobian_dot(const Vector3d& p_oe_rate) {
  Matrix6d j = Matrix6d::Zero();
  j.topRightCorner<3, 3>() = skew(p_oe_rate);
  return j;
}

GraspMatrices grasp_matrices(const std::vector<Vector3d>& p_oe) {
  if (p_oe.empty()) throw std::invalid_argument("grasp_matrices: need at least one agent");
  const int n = static_cast<int>(p_oe.size());
  GraspMatrices m{MatrixXd::Zero(6 * n, 6), MatrixXd::Zero(6 * n, 6 * n), MatrixXd::Zero(6 * n, 6)};
  for (int i = 0; i < n; ++i) {
    const Matrix6d inv = object_agent_jacobian_inverse(p_oe[i]);
    m.g.block<6, 6>(6 * i, 0) = object_agent_jacobian(p_oe[i]);
    m.g_tilde.block<6, 6>(6 * i, 6 * i) = inv;
    m.g_star.block<6, 6>(6 * i, 0) = inv.transpose() / n;
  }
  return m;
}

MatrixXd internal_force_projector(const std::vector<Vector3d>& p_oe) {
  const GraspMatrices m = grasp_matrices(p_oe);
  const auto n = m.g.rows();
  return MatrixXd::Identity(n, n) - m.g_star * m.g.transpose();
}

CoupledTerms coupled_terms(const ObjectModel& object, const ObjectState& state,
                           const std::vector<AgentModel>& agents, const std::vector<AgentState>& agent_states,
                           const GraspGeometry& grasp) {
  if (agents.size() != agent_states.size() || static_cast<int>(agents.size()) != grasp.size()) {
    throw std::invalid_argument("coupled_terms: agent, state and grasp counts differ");
  }
  const DynamicsTerms obj = model::object_dynamics_terms(object, state);
  CoupledTerms out;
  out.mass = obj.mass;
  out.coriolis = obj.coriolis;
  out.gravity = obj.gravity;
  out.agents.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    AgentCoupling& a = out.agents[i];
    a.p_oe = grasp.object_to_effector(static_cast<int>(i), state.orientation);
    a.j_o = object_agent_jacobian(a.p_oe);
    a.j_o_dot = object_agent_jacobian_dot(state.twist.angular.cross(a.p_oe));
    a.task = model::task_space_dynamics(agents[i], agent_states[i].q, agent_states[i].qdot);
    const Matrix6d jt_m = a.j_o.transpose() * a.task.mass;
    out.mass.noalias() += jt_m * a.j_o;
    out.coriolis.noalias() += a.j_o.transpose() * a.task.coriolis * a.j_o + jt_m * a.j_o_dot;
    out.gravity.noalias() += a.j_o.transpose() * a.task.gravity;
  }
  return out;
}

std::vector<Vector6d> contact_wrenches(const CoupledTerms& coupled, const std::vector<Vector6d>& v_i,
                                       const std::vector<Vector6d>& u, const std::vector<Vector6d>& vdot_i) {
  const std::size_t n = coupled.agents.size();
  if (v_i.size() != n || u.size() != n || vdot_i.size() != n) {
    throw std::invalid_argument("contact_wrenches: size mismatch");
  }
  std::vector<Vector6d> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DynamicsTerms& t = coupled.agents[i].task;
    f[i] = u[i] - t.mass * vdot_i[i] - t.coriolis * v_i[i] - t.gravity;
  }
  return f;
}

std::vector<Vector6d> contact_wrenches(const std::vector<AgentModel>& agents,
                                       const std::vector<AgentState>& agent_states,
                                       const std::vector<Vector6d>& u, const std::vector<Vector6d>& vdot_i) {
  if (agents.size() != agent_states.size() || u.size() != agents.size() || vdot_i.size() != agents.size()) {
    throw std::invalid_argument("contact_wrenches: size mismatch");
  }
  std::vector<Vector6d> f(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentState& s = agent_states[i];
    const DynamicsTerms t = model::task_space_dynamics(agents[i], s.q, s.qdot);
    const Vector6d v = model::geometric_jacobian(agents[i], s.q) * s.qdot;
    f[i] = u[i] - t.mass * vdot_i[i] - t.coriolis * v - t.gravity;
  }
  return f;
}

}  // namespace coop::coupling
