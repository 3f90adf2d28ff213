#pragma once

// Random draws and canonical models shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "coop/coupling.hpp"
#include "coop/model.hpp"
#include "coop/spatial_algebra.hpp"

namespace coop::testing {

using model::AgentModel;
using model::InertialParams;
using model::Pose;
using model::VectorXd;
using spatial::UnitQuaternion;

inline Vector3d random_vector(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline Vector6d random_vector6(std::mt19937_64& rng, double scale = 1.0) {
  Vector6d v;
  v << random_vector(rng, scale), random_vector(rng, scale);
  return v;
}

inline UnitQuaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return UnitQuaternion(Vector4d(n(rng), n(rng), n(rng), n(rng)));
}

inline Matrix3d random_rotation(std::mt19937_64& rng) {
  return spatial::quat_to_rotation(random_quaternion(rng)).matrix();
}

// Physically valid rigid body with a center of mass up to `com_scale` from
// the frame origin.
inline InertialParams random_inertial(std::mt19937_64& rng, double com_scale = 0.1) {
  std::uniform_real_distribution<double> mass(0.5, 3.0);
  std::uniform_real_distribution<double> side(0.05, 0.4);
  const double m = mass(rng);
  // Principal moments of a solid box always satisfy the triangle inequality.
  const Vector3d s2(std::pow(side(rng), 2), std::pow(side(rng), 2), std::pow(side(rng), 2));
  const Vector3d d = m / 12.0 * Vector3d(s2.y() + s2.z(), s2.x() + s2.z(), s2.x() + s2.y());
  const Matrix3d r = random_rotation(rng);
  return InertialParams::from_com(m, random_vector(rng, com_scale), r * d.asDiagonal() * r.transpose());
}

inline InertialParams box_inertial(double mass, const Vector3d& com, const Vector3d& size) {
  const Vector3d s2 = size.cwiseProduct(size);
  const Vector3d d = mass / 12.0 * Vector3d(s2.y() + s2.z(), s2.x() + s2.z(), s2.x() + s2.y());
  return InertialParams::from_com(mass, com, d.asDiagonal());
}

// Six-joint arm: shoulder yaw/pitch, elbow pitch, spherical wrist. At q = 0
// the tool frame sits at (0.6, 0, 0.2) from the base with identity
// orientation (a wrist-singular pose).
inline model::SerialChain canonical_chain(const Pose& base = {}) {
  model::SerialChain chain;
  chain.base = base;
  const Vector3d origins[6] = {{0, 0, 0.1}, {0, 0, 0.1}, {0.3, 0, 0}, {0.25, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  const Vector3d axes[6] = {Vector3d::UnitZ(), Vector3d::UnitY(), Vector3d::UnitY(),
                            Vector3d::UnitX(), Vector3d::UnitY(), Vector3d::UnitX()};
  const InertialParams links[6] = {
      box_inertial(1.5, {0, 0, 0.05}, {0.08, 0.08, 0.1}),
      box_inertial(1.2, {0.15, 0, 0}, {0.3, 0.05, 0.05}),
      box_inertial(0.9, {0.12, 0, 0.01}, {0.25, 0.04, 0.04}),
      box_inertial(0.4, {0.02, 0.01, 0}, {0.05, 0.05, 0.05}),
      box_inertial(0.3, {0.01, 0, 0.01}, {0.04, 0.04, 0.04}),
      box_inertial(0.2, {0.03, 0, 0}, {0.05, 0.03, 0.03}),
  };
  for (int k = 0; k < 6; ++k) {
    model::RevoluteJoint j;
    j.origin.position = origins[k];
    j.axis = axes[k];
    j.link = links[k];
    chain.joints.push_back(j);
  }
  chain.tool.position = {0.05, 0, 0};
  return chain;
}

inline AgentModel canonical_arm(const Pose& base = {}, const Vector3d& gravity = model::kDefaultGravity) {
  return AgentModel::serial_chain(canonical_chain(base), gravity);
}

// Joint configuration whose end-effector Jacobian has condition number
// below `max_condition`.
inline VectorXd random_arm_configuration(const AgentModel& arm, std::mt19937_64& rng,
                                         double max_condition = 200.0) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    VectorXd q(6);
    for (int k = 0; k < 6; ++k) q[k] = u(rng);
    if (model::condition_number(model::geometric_jacobian(arm, q)) < max_condition) return q;
  }
}

inline AgentModel random_body(std::mt19937_64& rng) {
  return AgentModel::task_space_body({random_inertial(rng)});
}

inline VectorXd random_body_configuration(std::mt19937_64& rng) {
  return model::body_configuration({random_vector(rng), random_quaternion(rng)});
}

// Object grasped by a serial chain and a task-space body, with joint rates
// consistent with a random object twist.
struct CoupledSystem {
  model::ObjectModel object;
  std::vector<AgentModel> agents;
  coupling::GraspGeometry grasp;
  model::ObjectState state;
  std::vector<coupling::AgentState> agent_states;
};

inline model::ObjectModel random_object(std::mt19937_64& rng) {
  const InertialParams p = random_inertial(rng, 0.0);
  model::ObjectModel o;
  o.mass = p.mass;
  o.inertia_sym = p.inertia_sym;
  return o;
}

// Rigid transport of agent rates: qdot_i = J_i^-1 J_O v_O.
inline std::vector<coupling::AgentState> consistent_agent_states(const std::vector<AgentModel>& agents,
                                                                 const coupling::GraspGeometry& grasp,
                                                                 const model::ObjectState& state,
                                                                 const std::vector<VectorXd>& q) {
  std::vector<coupling::AgentState> out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Vector3d p_oe = grasp.object_to_effector(static_cast<int>(i), state.orientation);
    const Vector6d v_i = coupling::object_agent_jacobian(p_oe) * state.twist.vector();
    out.push_back({q[i], model::geometric_jacobian(agents[i], q[i]).partialPivLu().solve(v_i)});
  }
  return out;
}

inline CoupledSystem random_coupled_system(std::mt19937_64& rng, double speed = 1.0) {
  CoupledSystem s;
  s.object = random_object(rng);
  s.agents.push_back(canonical_arm({random_vector(rng, 0.2), random_quaternion(rng)}));
  s.agents.push_back(random_body(rng));
  s.grasp.offsets.push_back({random_vector(rng, 0.15), random_quaternion(rng)});
  s.grasp.offsets.push_back({random_vector(rng, 0.15), random_quaternion(rng)});
  std::vector<VectorXd> q{random_arm_configuration(s.agents[0], rng, 50.0)};
  const Pose object_pose = s.grasp.object_pose(0, model::forward_kinematics(s.agents[0], q[0]));
  q.push_back(model::body_configuration(s.grasp.effector_pose(1, object_pose)));
  s.state.position = object_pose.position;
  s.state.orientation = object_pose.orientation;
  s.state.twist = spatial::Twist::from_vector(random_vector6(rng, speed));
  s.agent_states = consistent_agent_states(s.agents, s.grasp, s.state, q);
  return s;
}

inline UnitQuaternion rotate_by(const UnitQuaternion& q, const Vector3d& omega, double h) {
  if (omega.norm() == 0.0) return q;
  return UnitQuaternion::from_axis_angle(omega, omega.norm() * h) * q;
}

// Object moved for time h at its current (constant) twist; agents moved to
// first order along their consistent joint rates.
inline CoupledSystem advance(const CoupledSystem& s, double h) {
  CoupledSystem out = s;
  out.state.position += h * s.state.twist.linear;
  out.state.orientation = rotate_by(s.state.orientation, s.state.twist.angular, h);
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const VectorXd& q = s.agent_states[i].q;
    const VectorXd& qd = s.agent_states[i].qdot;
    if (s.agents[i].kind() == AgentModel::Kind::kSerialChain) {
      out.agent_states[i].q = q + h * qd;
    } else {
      VectorXd q2 = q;
      q2.head<3>() += h * qd.head<3>();
      q2.tail<4>() = rotate_by(UnitQuaternion(Vector4d(q.tail<4>())), qd.tail<3>(), h).coeffs();
      out.agent_states[i].q = q2;
    }
  }
  return out;
}

}  // namespace coop::testing
