#include "coop/model.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "coop/errors.hpp"

namespace coop::model {

using spatial::quat_to_rotation;
using spatial::skew;

// ---------------------------------------------------------------------------
// Inertial parameters

Matrix3d inertia_from_sym(const Vector6d& sym) {
  Matrix3d i;
  i << sym[0], sym[3], sym[4],
       sym[3], sym[1], sym[5],
       sym[4], sym[5], sym[2];
  return i;
}

namespace {

Vector6d sym_from_inertia(const Matrix3d& i) {
  Vector6d sym;
  sym << i(0, 0), i(1, 1), i(2, 2), i(0, 1), i(0, 2), i(1, 2);
  return sym;
}

}  // namespace

InertialParams InertialParams::from_com(double mass, const Vector3d& com, const Matrix3d& inertia_about_com) {
  InertialParams p;
  p.mass = mass;
  p.first_moment = mass * com;
  const Matrix3d shift = mass * (com.squaredNorm() * Matrix3d::Identity() - com * com.transpose());
  p.inertia_sym = sym_from_inertia(inertia_about_com + shift);
  return p;
}

InertialParams InertialParams::from_vector(const Vector10d& theta) {
  InertialParams p;
  p.mass = theta[0];
  p.first_moment = theta.segment<3>(1);
  p.inertia_sym = theta.tail<6>();
  return p;
}

Vector10d InertialParams::to_vector() const {
  Vector10d theta;
  theta << mass, first_moment, inertia_sym;
  return theta;
}

Matrix3d InertialParams::inertia() const { return inertia_from_sym(inertia_sym); }

Matrix3d InertialParams::inertia_about_com() const {
  if (mass <= 0.0) return inertia();
  const Vector3d com = first_moment / mass;
  return inertia() - mass * (com.squaredNorm() * Matrix3d::Identity() - com * com.transpose());
}

void InertialParams::validate(std::string_view what) const {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(std::string(what) + ": " + msg);
  };
  if (!std::isfinite(mass) || !first_moment.allFinite() || !inertia_sym.allFinite()) {
    fail("non-finite inertial parameter");
  }
  if (mass <= 0.0) fail("mass must be positive");
  const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(inertia_about_com());
  const Vector3d l = eig.eigenvalues();
  if (l.minCoeff() <= 0.0) fail("inertia about the center of mass is not positive definite");
  const double slack = 1e-12 * l.maxCoeff();
  if (l[0] + l[1] < l[2] - slack || l[0] + l[2] < l[1] - slack || l[1] + l[2] < l[0] - slack) {
    fail("principal moments violate the triangle inequality");
  }
}

Matrix6d spatial_inertia(const InertialParams& params, const Matrix3d& rotation) {
  const Vector3d h = rotation * params.first_moment;
  const Matrix3d i_w = rotation * params.inertia() * rotation.transpose();
  Matrix6d lambda;
  lambda << params.mass * Matrix3d::Identity(), -skew(h),
            skew(h), i_w;
  return lambda;
}

Vector7d ObjectModel::parameters() const {
  Vector7d theta;
  theta << mass, inertia_sym;
  return theta;
}

ObjectModel ObjectModel::from_parameters(const Vector7d& theta, const Vector3d& gravity) {
  ObjectModel o;
  o.mass = theta[0];
  o.inertia_sym = theta.tail<6>();
  o.gravity = gravity;
  return o;
}

InertialParams ObjectModel::inertial() const {
  InertialParams p;
  p.mass = mass;
  p.inertia_sym = inertia_sym;
  return p;
}

void ObjectModel::validate() const { inertial().validate("object"); }

// ---------------------------------------------------------------------------
// Agent model

AgentModel AgentModel::serial_chain(SerialChain chain, const Vector3d& gravity) {
  AgentModel a;
  a.kind_ = Kind::kSerialChain;
  a.chain_ = std::move(chain);
  a.gravity_ = gravity;
  return a;
}

AgentModel AgentModel::task_space_body(TaskSpaceBody body, const Vector3d& gravity) {
  AgentModel a;
  a.kind_ = Kind::kTaskSpaceBody;
  a.body_ = body;
  a.gravity_ = gravity;
  return a;
}

int AgentModel::parameter_count() const {
  return kind_ == Kind::kSerialChain ? InertialParams::kSize * static_cast<int>(chain_.joints.size())
                                     : InertialParams::kSize;
}

VectorXd AgentModel::parameters() const {
  VectorXd theta(parameter_count());
  if (kind_ == Kind::kTaskSpaceBody) {
    theta = body_.params.to_vector();
  } else {
    for (std::size_t k = 0; k < chain_.joints.size(); ++k) {
      theta.segment<InertialParams::kSize>(InertialParams::kSize * k) = chain_.joints[k].link.to_vector();
    }
  }
  return theta;
}

AgentModel AgentModel::with_parameters(const VectorXd& theta) const {
  if (theta.size() != parameter_count()) {
    throw std::invalid_argument("AgentModel::with_parameters: wrong parameter count");
  }
  AgentModel out = *this;
  if (kind_ == Kind::kTaskSpaceBody) {
    out.body_.params = InertialParams::from_vector(theta);
  } else {
    for (std::size_t k = 0; k < chain_.joints.size(); ++k) {
      out.chain_.joints[k].link =
          InertialParams::from_vector(theta.segment<InertialParams::kSize>(InertialParams::kSize * k));
    }
  }
  return out;
}

void AgentModel::validate() const {
  if (kind_ == Kind::kTaskSpaceBody) {
    body_.params.validate("task-space body");
    return;
  }
  if (chain_.joints.size() != kChainJoints) {
    throw std::invalid_argument("serial chain must have exactly 6 revolute joints");
  }
  for (std::size_t k = 0; k < chain_.joints.size(); ++k) {
    if (chain_.joints[k].axis.norm() < 1e-12) {
      throw std::invalid_argument("joint " + std::to_string(k) + ": zero axis");
    }
    chain_.joints[k].link.validate("link " + std::to_string(k));
  }
}

// ---------------------------------------------------------------------------
// Serial-chain kinematics

namespace {

struct ChainKinematics {
  std::array<Matrix3d, 6> rotation;  // link frames
  std::array<Vector3d, 6> origin;    // joint origin == link origin
  std::array<Vector3d, 6> axis;      // joint axes, world
  Matrix3d ee_rotation;
  Vector3d ee_position;
};

void require_chain_dims(const AgentModel& agent, const VectorXd& q) {
  if (agent.chain().joints.size() != AgentModel::kChainJoints) {
    throw std::invalid_argument("serial chain must have exactly 6 revolute joints");
  }
  if (q.size() != AgentModel::kChainJoints) {
    throw std::invalid_argument("serial chain configuration must have 6 entries");
  }
}

ChainKinematics chain_kinematics(const SerialChain& chain, const VectorXd& q) {
  ChainKinematics kin;
  Matrix3d r = quat_to_rotation(chain.base.orientation).matrix();
  Vector3d p = chain.base.position;
  for (int k = 0; k < AgentModel::kChainJoints; ++k) {
    const RevoluteJoint& joint = chain.joints[k];
    const Vector3d axis = joint.axis.normalized();
    const Matrix3d r_joint = r * quat_to_rotation(joint.origin.orientation).matrix();
    p = p + r * joint.origin.position;
    kin.axis[k] = r_joint * axis;
    r = r_joint * Eigen::AngleAxisd(q[k], axis).toRotationMatrix();
    kin.rotation[k] = r;
    kin.origin[k] = p;
  }
  kin.ee_rotation = r * quat_to_rotation(chain.tool.orientation).matrix();
  kin.ee_position = p + r * chain.tool.position;
  return kin;
}

// Jacobian of point x rigidly attached to link `link`.
Matrix6d point_jacobian(const ChainKinematics& kin, int link, const Vector3d& x) {
  Matrix6d j = Matrix6d::Zero();
  for (int c = 0; c <= link; ++c) {
    j.col(c) << kin.axis[c].cross(x - kin.origin[c]), kin.axis[c];
  }
  return j;
}

// d/dq_i of point_jacobian(kin, link, x).
Matrix6d point_jacobian_partial(const ChainKinematics& kin, int link, const Vector3d& x, int i) {
  Matrix6d d = Matrix6d::Zero();
  if (i > link) return d;
  const Vector3d& zi = kin.axis[i];
  for (int c = 0; c <= link; ++c) {
    const Vector3d& zc = kin.axis[c];
    if (i < c) {
      const Vector3d dz = zi.cross(zc);
      const Vector3d r = x - kin.origin[c];
      d.col(c) << dz.cross(r) + zc.cross(zi.cross(r)), dz;
    } else {
      d.col(c).head<3>() = zc.cross(zi.cross(x - kin.origin[i]));
    }
  }
  return d;
}

struct ChainJacobians {
  std::array<Matrix6d, 6> link;                        // link-origin Jacobians
  std::array<std::array<Matrix6d, 6>, 6> link_partial;  // [link][joint]
};

ChainJacobians chain_jacobians(const ChainKinematics& kin) {
  ChainJacobians out;
  for (int k = 0; k < 6; ++k) {
    out.link[k] = point_jacobian(kin, k, kin.origin[k]);
    for (int i = 0; i < 6; ++i) out.link_partial[k][i] = point_jacobian_partial(kin, k, kin.origin[k], i);
  }
  return out;
}

// Mass matrix, its partials along each joint, and the gravity vector of one
// link's contribution (or the sum over links).
struct MassTerms {
  Matrix6d mass = Matrix6d::Zero();
  std::array<Matrix6d, 6> partial{};
  Vector6d gravity = Vector6d::Zero();

  MassTerms() {
    for (auto& p : partial) p.setZero();
  }
};

void add_link_terms(const ChainKinematics& kin, const ChainJacobians& jac, int k, const InertialParams& params,
                    const Vector3d& gravity, MassTerms& out) {
  const Matrix3d& r = kin.rotation[k];
  const Vector3d h = r * params.first_moment;
  const Matrix3d i_w = r * params.inertia() * r.transpose();
  Matrix6d lambda;
  lambda << params.mass * Matrix3d::Identity(), -skew(h), skew(h), i_w;

  const Matrix6d& j = jac.link[k];
  const Matrix6d lj = lambda * j;
  out.mass.noalias() += j.transpose() * lj;
  for (int i = 0; i <= k; ++i) {
    const Matrix6d& dj = jac.link_partial[k][i];
    const Vector3d& z = kin.axis[i];
    const Vector3d dh = z.cross(h);
    Matrix6d dlambda;
    dlambda << Matrix3d::Zero(), -skew(dh), skew(dh), skew(z) * i_w - i_w * skew(z);
    const Matrix6d sym = dj.transpose() * lj;
    out.partial[i].noalias() += sym + sym.transpose() + j.transpose() * dlambda * j;
  }
  Vector6d g6;
  g6 << gravity, Vector3d::Zero();
  out.gravity.noalias() -= j.transpose() * (lambda * g6);
}

MassTerms chain_mass_terms(const AgentModel& agent, const ChainKinematics& kin, const ChainJacobians& jac) {
  MassTerms terms;
  for (int k = 0; k < 6; ++k) add_link_terms(kin, jac, k, agent.chain().joints[k].link, agent.gravity(), terms);
  return terms;
}

Matrix6d mass_rate(const MassTerms& t, const VectorXd& qdot) {
  Matrix6d m_dot = Matrix6d::Zero();
  for (int i = 0; i < 6; ++i) m_dot += qdot[i] * t.partial[i];
  return m_dot;
}

// Christoffel-symbol Coriolis matrix: C = 1/2 (Mdot + A - A^T) with
// A(:, j) = dM/dq_j qdot.
Matrix6d christoffel_coriolis(const MassTerms& t, const VectorXd& qdot) {
  Matrix6d a;
  for (int j = 0; j < 6; ++j) a.col(j) = t.partial[j] * qdot;
  return 0.5 * (mass_rate(t, qdot) + a - a.transpose());
}

Matrix6d ee_jacobian_derivative(const ChainKinematics& kin, const VectorXd& qdot) {
  Matrix6d j_dot = Matrix6d::Zero();
  for (int i = 0; i < 6; ++i) j_dot += qdot[i] * point_jacobian_partial(kin, 5, kin.ee_position, i);
  return j_dot;
}

// ---------------------------------------------------------------------------
// Task-space body helpers

Matrix6d rotation_rate_operator(const Vector3d& w) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = skew(w);
  m.bottomRightCorner<3, 3>() = skew(w);
  return m;
}

Matrix3d body_rotation(const VectorXd& q) {
  return quat_to_rotation(UnitQuaternion(q.tail<4>())).matrix();
}

void require_body_dims(const VectorXd& q, const VectorXd& qdot) {
  if (q.size() != 7) throw std::invalid_argument("task-space body configuration must have 7 entries");
  if (qdot.size() != 6) throw std::invalid_argument("task-space body velocity must have 6 entries");
}

// Coriolis matrix of a rigid body about its frame origin, in world axes:
// C = [[0, -S(w x h)], [0, S(w) I_w]]. C nu reproduces the bias wrench
// (w x (w x h), w x I_w w) and Mdot - 2C is skew-symmetric. With h = 0 this
// is the object's C_O.
Matrix6d body_coriolis(const Matrix6d& lambda, const Vector6d& nu) {
  const Vector3d w = nu.tail<3>();
  const Vector3d h(lambda(5, 1), lambda(3, 2), lambda(4, 0));  // lower-left block is S(h)
  Matrix6d c = Matrix6d::Zero();
  c.topRightCorner<3, 3>() = -skew(w.cross(h));
  c.bottomRightCorner<3, 3>() = skew(w) * lambda.bottomRightCorner<3, 3>();
  return c;
}

DynamicsTerms body_dynamics(const InertialParams& params, const Vector3d& gravity, const VectorXd& q,
                            const VectorXd& qdot) {
  const Matrix6d lambda = spatial_inertia(params, body_rotation(q));
  DynamicsTerms t;
  t.mass = lambda;
  t.coriolis = body_coriolis(lambda, qdot);
  Vector6d g6;
  g6 << gravity, Vector3d::Zero();
  t.gravity = -lambda * g6;
  return t;
}

Matrix6d checked_inverse(const Matrix6d& j) {
  const double cond = condition_number(j);
  if (!(cond <= kSingularCondition)) {
    std::ostringstream msg;
    msg << "agent Jacobian is singular (condition number " << cond << ")";
    throw SingularityError(msg.str(), cond);
  }
  return j.partialPivLu().inverse();
}

}  // namespace

VectorXd body_configuration(const Pose& pose) {
  VectorXd q(7);
  q << pose.position, pose.orientation.coeffs();
  return q;
}

Pose forward_kinematics(const AgentModel& agent, const VectorXd& q) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    if (q.size() != 7) throw std::invalid_argument("task-space body configuration must have 7 entries");
    return {q.head<3>(), UnitQuaternion(Vector4d(q.tail<4>()))};
  }
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  return {kin.ee_position, spatial::rotation_to_quat(kin.ee_rotation)};
}

Matrix6d geometric_jacobian(const AgentModel& agent, const VectorXd& q) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) return Matrix6d::Identity();
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  return point_jacobian(kin, 5, kin.ee_position);
}

Matrix6d geometric_jacobian_derivative(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) return Matrix6d::Zero();
  require_chain_dims(agent, q);
  return ee_jacobian_derivative(chain_kinematics(agent.chain(), q), qdot);
}

double condition_number(const Matrix6d& m) {
  const Eigen::JacobiSVD<Matrix6d> svd(m);
  const auto& s = svd.singularValues();
  if (s[5] == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[5];
}

VectorXd configuration_rate(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot) {
  if (agent.kind() == AgentModel::Kind::kSerialChain) return qdot;
  require_body_dims(q, qdot);
  VectorXd rate(7);
  rate << qdot.head<3>(), spatial::quat_rate(UnitQuaternion(Vector4d(q.tail<4>())), qdot.tail<3>());
  return rate;
}

void normalize_configuration(const AgentModel& agent, VectorXd& q) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) q.tail<4>().normalize();
}

VectorXd inverse_kinematics(const AgentModel& agent, const Pose& target, const VectorXd& seed, double tolerance,
                            int max_iterations) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) return body_configuration(target);
  VectorXd q = seed;
  require_chain_dims(agent, q);
  double err_norm = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Pose pose = forward_kinematics(agent, q);
    UnitQuaternion rel = target.orientation * pose.orientation.conjugate();
    if (rel.eta() < 0.0) rel = -rel;
    Vector6d err;
    err << target.position - pose.position, 2.0 * rel.epsilon();
    err_norm = err.norm();
    if (err_norm < tolerance) return q;
    const Matrix6d j = geometric_jacobian(agent, q);
    const Matrix6d jjt = j * j.transpose() + 1e-10 * Matrix6d::Identity();
    VectorXd step = j.transpose() * jjt.ldlt().solve(err);
    const double step_norm = step.norm();
    if (step_norm > 0.5) step *= 0.5 / step_norm;
    q += step;
  }
  std::ostringstream msg;
  msg << "inverse kinematics did not converge (residual " << err_norm << ")";
  throw std::runtime_error(msg.str());
}

// ---------------------------------------------------------------------------
// Dynamics

DynamicsTerms joint_space_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    require_body_dims(q, qdot);
    return body_dynamics(agent.body().params, agent.gravity(), q, qdot);
  }
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  const ChainJacobians jac = chain_jacobians(kin);
  const MassTerms terms = chain_mass_terms(agent, kin, jac);
  DynamicsTerms out;
  out.mass = terms.mass;
  out.coriolis = christoffel_coriolis(terms, qdot);
  out.gravity = terms.gravity;
  return out;
}

Matrix6d joint_space_mass_rate(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    require_body_dims(q, qdot);
    const Matrix6d lambda = spatial_inertia(agent.body().params, body_rotation(q));
    const Matrix6d omega = rotation_rate_operator(qdot.tail<3>());
    return omega * lambda - lambda * omega;
  }
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  return mass_rate(chain_mass_terms(agent, kin, chain_jacobians(kin)), qdot);
}

double potential_energy(const AgentModel& agent, const VectorXd& q) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    const InertialParams& b = agent.body().params;
    return -agent.gravity().dot(b.mass * q.head<3>() + body_rotation(q) * b.first_moment);
  }
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  double u = 0.0;
  for (int k = 0; k < 6; ++k) {
    const InertialParams& link = agent.chain().joints[k].link;
    u -= agent.gravity().dot(link.mass * kin.origin[k] + kin.rotation[k] * link.first_moment);
  }
  return u;
}

VectorXd inverse_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                          const VectorXd& qddot) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    const DynamicsTerms t = body_dynamics(agent.body().params, agent.gravity(), q, qdot);
    return t.mass * qddot + t.coriolis * qdot + t.gravity;
  }
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);

  // Forward pass: link-origin accelerations (gravity folded into the base),
  // angular velocities and accelerations.
  std::array<Vector3d, 6> force, moment;
  Vector3d w = Vector3d::Zero();
  Vector3d w_dot = Vector3d::Zero();
  Vector3d a = -agent.gravity();
  Vector3d p_prev = agent.chain().base.position;
  for (int k = 0; k < 6; ++k) {
    const Vector3d r = kin.origin[k] - p_prev;
    a = a + w_dot.cross(r) + w.cross(w.cross(r));
    const Vector3d z = kin.axis[k];
    w_dot = w_dot + z * qddot[k] + w.cross(z * qdot[k]);
    w = w + z * qdot[k];
    p_prev = kin.origin[k];

    const InertialParams& link = agent.chain().joints[k].link;
    const Matrix3d& rot = kin.rotation[k];
    const Vector3d h = rot * link.first_moment;
    const Matrix3d i_w = rot * link.inertia() * rot.transpose();
    force[k] = link.mass * a + w_dot.cross(h) + w.cross(w.cross(h));
    moment[k] = i_w * w_dot + w.cross(i_w * w) + h.cross(a);
  }

  // Backward pass: accumulate wrenches about each joint origin.
  VectorXd tau(6);
  Vector3d f = Vector3d::Zero();
  Vector3d n = Vector3d::Zero();
  for (int k = 5; k >= 0; --k) {
    if (k < 5) n = n + (kin.origin[k + 1] - kin.origin[k]).cross(f);
    f = f + force[k];
    n = n + moment[k];
    tau[k] = kin.axis[k].dot(n);
  }
  return tau;
}

DynamicsTerms task_space_dynamics(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot) {
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) return joint_space_dynamics(agent, q, qdot);
  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  const Matrix6d j = point_jacobian(kin, 5, kin.ee_position);
  const Matrix6d j_inv = checked_inverse(j);
  const Matrix6d j_dot = ee_jacobian_derivative(kin, qdot);
  const MassTerms terms = chain_mass_terms(agent, kin, chain_jacobians(kin));
  const Matrix6d c_q = christoffel_coriolis(terms, qdot);

  DynamicsTerms out;
  out.mass = j_inv.transpose() * terms.mass * j_inv;
  out.coriolis = j_inv.transpose() * (c_q - terms.mass * j_inv * j_dot) * j_inv;
  out.gravity = j_inv.transpose() * terms.gravity;
  return out;
}

DynamicsTerms object_dynamics_terms(const ObjectModel& object, const ObjectState& state) {
  const Matrix3d r = quat_to_rotation(state.orientation).matrix();
  const Matrix3d i_w = r * inertia_from_sym(object.inertia_sym) * r.transpose();
  DynamicsTerms t;
  t.mass.topLeftCorner<3, 3>() = object.mass * Matrix3d::Identity();
  t.mass.bottomRightCorner<3, 3>() = i_w;
  t.coriolis.bottomRightCorner<3, 3>() = skew(state.twist.angular) * i_w;
  t.gravity.head<3>() = -object.mass * object.gravity;
  return t;
}

Matrix67d object_regressor(const Vector3d& gravity, const ObjectState& state, const Vector6d& v,
                           const Vector6d& vdot) {
  const Matrix3d r = quat_to_rotation(state.orientation).matrix();
  const Matrix3d s_w = skew(state.twist.angular);
  const Vector3d w_ref = v.tail<3>();
  const Vector3d w_ref_dot = vdot.tail<3>();
  Matrix67d y = Matrix67d::Zero();
  y.col(0).head<3>() = vdot.head<3>() - gravity;
  for (int k = 0; k < 6; ++k) {
    Vector6d basis = Vector6d::Zero();
    basis[k] = 1.0;
    const Matrix3d i_w = r * inertia_from_sym(basis) * r.transpose();
    y.col(1 + k).tail<3>() = i_w * w_ref_dot + s_w * (i_w * w_ref);
  }
  return y;
}

MatrixXd agent_task_regressor(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                              const Vector6d& v_i, const Vector6d& vdot_i) {
  MatrixXd h(6, agent.parameter_count());
  if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
    require_body_dims(q, qdot);
    for (int p = 0; p < InertialParams::kSize; ++p) {
      const DynamicsTerms t =
          body_dynamics(InertialParams::from_vector(Vector10d::Unit(p)), agent.gravity(), q, qdot);
      h.col(p) = t.mass * vdot_i + t.coriolis * v_i + t.gravity;
    }
    return h;
  }

  require_chain_dims(agent, q);
  const ChainKinematics kin = chain_kinematics(agent.chain(), q);
  const ChainJacobians jac = chain_jacobians(kin);
  const Matrix6d j = point_jacobian(kin, 5, kin.ee_position);
  const Matrix6d j_inv = checked_inverse(j);
  const Matrix6d j_dot = ee_jacobian_derivative(kin, qdot);
  // M_i vdot_i + C_i v_i + g_i = J^-T (M_q a + C_q b + g_q) with b the joint
  // velocity reproducing v_i and a the joint acceleration reproducing vdot_i.
  const Vector6d b = j_inv * v_i;
  const Vector6d a = j_inv * (vdot_i - j_dot * b);
  for (int k = 0; k < 6; ++k) {
    for (int p = 0; p < InertialParams::kSize; ++p) {
      MassTerms terms;
      add_link_terms(kin, jac, k, InertialParams::from_vector(Vector10d::Unit(p)), agent.gravity(), terms);
      const Matrix6d c_q = christoffel_coriolis(terms, qdot);
      h.col(InertialParams::kSize * k + p) = j_inv.transpose() * (terms.mass * a + c_q * b + terms.gravity);
    }
  }
  return h;
}

MatrixXd agent_regressor(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot,
                         const Matrix6d& object_jacobian, const Matrix6d& object_jacobian_dot, const Vector6d& v,
                         const Vector6d& vdot) {
  const Vector6d v_i = object_jacobian * v;
  const Vector6d vdot_i = object_jacobian * vdot + object_jacobian_dot * v;
  return object_jacobian.transpose() * agent_task_regressor(agent, q, qdot, v_i, vdot_i);
}

}  // namespace coop::model
