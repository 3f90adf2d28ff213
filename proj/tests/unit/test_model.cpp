#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "coop/errors.hpp"
#include "coop/model.hpp"
#include "fixtures.hpp"

namespace coop::model {
namespace {

using spatial::UnitQuaternion;
using namespace coop::testing;

double min_eigenvalue(const Matrix6d& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix6d>(0.5 * (m + m.transpose())).eigenvalues().minCoeff();
}

// Advances a configuration by `h` along velocity `qdot` (exact for a body's
// constant twist, first order for a chain which is what a symmetric
// difference needs).
VectorXd advance(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot, double h) {
  if (agent.kind() == AgentModel::Kind::kSerialChain) return q + h * qdot;
  VectorXd out = q;
  out.head<3>() += h * qdot.head<3>();
  const UnitQuaternion xi(Vector4d(q.tail<4>()));
  const UnitQuaternion next = h > 0 ? spatial::integrate_quat(xi, qdot.tail<3>(), h)
                                    : spatial::integrate_quat(xi, -qdot.tail<3>(), -h);
  out.tail<4>() = next.coeffs();
  return out;
}

TEST(InertialParams, ParallelAxisRoundTrip) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 50; ++t) {
    const InertialParams p = random_inertial(rng);
    EXPECT_NO_THROW(p.validate("body"));
    const InertialParams back = InertialParams::from_vector(p.to_vector());
    EXPECT_EQ(back.to_vector(), p.to_vector());
    const Vector3d com = p.first_moment / p.mass;
    const InertialParams again = InertialParams::from_com(p.mass, com, p.inertia_about_com());
    EXPECT_LT((again.to_vector() - p.to_vector()).norm(), 1e-14);
  }
}

TEST(InertialParams, ValidationRejectsNonPhysicalBodies) {
  InertialParams p = box_inertial(1.0, Vector3d::Zero(), {0.1, 0.2, 0.3});
  EXPECT_NO_THROW(p.validate("box"));
  InertialParams zero_mass = p;
  zero_mass.mass = 0.0;
  EXPECT_THROW(zero_mass.validate("box"), std::invalid_argument);
  InertialParams triangle = InertialParams::from_com(1.0, Vector3d::Zero(), Vector3d(1.0, 1.0, 3.0).asDiagonal());
  EXPECT_THROW(triangle.validate("box"), std::invalid_argument);
  InertialParams indefinite = p;
  indefinite.inertia_sym[0] = -1.0;
  EXPECT_THROW(indefinite.validate("box"), std::invalid_argument);
}

TEST(AgentModel, ValidatesJointCount) {
  model::SerialChain chain = canonical_chain();
  EXPECT_NO_THROW(AgentModel::serial_chain(chain).validate());
  chain.joints.pop_back();
  EXPECT_THROW(AgentModel::serial_chain(chain).validate(), std::invalid_argument);
}

TEST(AgentModel, ParameterRoundTrip) {
  const AgentModel arm = canonical_arm();
  EXPECT_EQ(arm.parameter_count(), 60);
  const VectorXd theta = arm.parameters();
  EXPECT_EQ(arm.with_parameters(theta).parameters(), theta);
  EXPECT_THROW((void)arm.with_parameters(VectorXd::Zero(10)), std::invalid_argument);
}

TEST(ForwardKinematics, CanonicalHomePose) {
  const Pose home = forward_kinematics(canonical_arm(), VectorXd::Zero(6));
  EXPECT_LT((home.position - Vector3d(0.6, 0.0, 0.2)).norm(), 1e-15);
  EXPECT_LT((home.orientation.coeffs() - Vector4d(1, 0, 0, 0)).norm(), 1e-15);
}

TEST(ForwardKinematics, BaseYawQuarterTurnMovesToolToY) {
  VectorXd q = VectorXd::Zero(6);
  q[0] = std::numbers::pi / 2;
  const Pose p = forward_kinematics(canonical_arm(), q);
  EXPECT_LT((p.position - Vector3d(0.0, 0.6, 0.2)).norm(), 1e-15);
}

TEST(ForwardKinematics, BodyChartRoundTrip) {
  std::mt19937_64 rng(21);
  const AgentModel body = random_body(rng);
  const Pose pose{random_vector(rng), random_quaternion(rng)};
  const Pose back = forward_kinematics(body, body_configuration(pose));
  EXPECT_EQ(back.position, pose.position);
  EXPECT_LT((back.orientation.coeffs() - pose.orientation.coeffs()).norm(), 1e-15);
  EXPECT_EQ(geometric_jacobian(body, body_configuration(pose)), Matrix6d::Identity());
}

TEST(Jacobian, BaseJointLeverArm) {
  const Matrix6d j = geometric_jacobian(canonical_arm(), VectorXd::Zero(6));
  // Tool at horizontal distance 0.6 from the base yaw axis.
  EXPECT_NEAR(j.col(0).head<3>().norm(), 0.6, 1e-15);
}

TEST(Jacobian, MatchesFiniteDifferenceOfForwardKinematics) {
  std::mt19937_64 rng(22);
  const AgentModel arm = canonical_arm({random_vector(rng), random_quaternion(rng)});
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const VectorXd q = random_arm_configuration(arm, rng);
    const Matrix6d j = geometric_jacobian(arm, q);
    for (int k = 0; k < 6; ++k) {
      VectorXd qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const Pose a = forward_kinematics(arm, qp);
      const Pose b = forward_kinematics(arm, qm);
      const Vector3d dp = (a.position - b.position) / (2 * h);
      const UnitQuaternion xi = forward_kinematics(arm, q).orientation;
      const Vector4d dxi = (spatial::continue_sign(xi, a.orientation).coeffs() -
                            spatial::continue_sign(xi, b.orientation).coeffs()) / (2 * h);
      const Vector3d w = spatial::omega_from_quat_rate(xi, dxi);
      EXPECT_LT((dp - j.col(k).head<3>()).norm(), 1e-5);
      EXPECT_LT((w - j.col(k).tail<3>()).norm(), 1e-5);
    }
  }
}

TEST(Jacobian, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(23);
  const AgentModel arm = canonical_arm();
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const VectorXd q = random_arm_configuration(arm, rng);
    const VectorXd qdot = random_vector6(rng, 2.0);
    const Matrix6d fd = (geometric_jacobian(arm, q + h * qdot) - geometric_jacobian(arm, q - h * qdot)) / (2 * h);
    EXPECT_LT((fd - geometric_jacobian_derivative(arm, q, qdot)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(InverseKinematics, RecoversReachablePose) {
  std::mt19937_64 rng(24);
  const AgentModel arm = canonical_arm();
  for (int t = 0; t < 10; ++t) {
    const VectorXd q = random_arm_configuration(arm, rng, 50.0);
    const Pose target = forward_kinematics(arm, q);
    const VectorXd seed = q + 0.1 * random_vector6(rng);
    const VectorXd sol = inverse_kinematics(arm, target, seed);
    const Pose reached = forward_kinematics(arm, sol);
    EXPECT_LT((reached.position - target.position).norm(), 1e-10);
    EXPECT_LT(spatial::rotation_angle_between(reached.orientation, target.orientation), 1e-10);
  }
}

// One moving link: joint 0 about the world y axis, all other links
// massless. M = m l^2 + lambda, g = -m g0 l cos(q).
TEST(JointSpaceDynamics, PendulumOracle) {
  const double m = 2.0, l = 0.4, lambda = 0.03, g0 = 9.81;
  model::SerialChain chain = canonical_chain();
  for (auto& j : chain.joints) j.link = InertialParams{};
  chain.joints[0].axis = Vector3d::UnitY();
  chain.joints[0].link = InertialParams::from_com(m, {l, 0, 0}, lambda * Matrix3d::Identity());
  const AgentModel pendulum = AgentModel::serial_chain(chain);
  for (double q0 : {-1.0, 0.0, 0.3, 1.2}) {
    VectorXd q = VectorXd::Zero(6);
    q[0] = q0;
    const DynamicsTerms t = joint_space_dynamics(pendulum, q, VectorXd::Zero(6));
    EXPECT_NEAR(t.mass(0, 0), m * l * l + lambda, 1e-14);
    EXPECT_NEAR(t.gravity[0], -m * g0 * l * std::cos(q0), 1e-12);
  }
}

TEST(JointSpaceDynamics, ZeroVelocityHasNoCoriolis) {
  std::mt19937_64 rng(25);
  const AgentModel arm = canonical_arm();
  const VectorXd q = random_arm_configuration(arm, rng);
  EXPECT_EQ(joint_space_dynamics(arm, q, VectorXd::Zero(6)).coriolis, Matrix6d::Zero());
}

TEST(JointSpaceDynamics, MatchesRecursiveNewtonEuler) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 200; ++t) {
    const AgentModel arm = canonical_arm({random_vector(rng), random_quaternion(rng)}, random_vector(rng, 10.0));
    VectorXd q(6);
    q = random_vector6(rng, 3.0);
    const VectorXd qdot = random_vector6(rng, 2.0);
    const VectorXd qddot = random_vector6(rng, 5.0);
    const DynamicsTerms d = joint_space_dynamics(arm, q, qdot);
    const VectorXd tau = inverse_dynamics(arm, q, qdot, qddot);
    ASSERT_LT((d.mass * qddot + d.coriolis * qdot + d.gravity - tau).norm(), 1e-10 * (1.0 + tau.norm()));
  }
}

TEST(JointSpaceDynamics, GravityIsPotentialGradient) {
  std::mt19937_64 rng(27);
  const AgentModel arm = canonical_arm();
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const VectorXd q = random_vector6(rng, 3.0);
    const Vector6d g = joint_space_dynamics(arm, q, VectorXd::Zero(6)).gravity;
    for (int k = 0; k < 6; ++k) {
      VectorXd qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      EXPECT_NEAR((potential_energy(arm, qp) - potential_energy(arm, qm)) / (2 * h), g[k], 1e-7);
    }
  }
}

TEST(JointSpaceDynamics, MassRateMatchesFiniteDifference) {
  std::mt19937_64 rng(28);
  const AgentModel arm = canonical_arm();
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const VectorXd q = random_vector6(rng, 3.0);
    const VectorXd qdot = random_vector6(rng, 2.0);
    const Matrix6d fd = (joint_space_dynamics(arm, q + h * qdot, qdot).mass -
                         joint_space_dynamics(arm, q - h * qdot, qdot).mass) / (2 * h);
    EXPECT_LT((fd - joint_space_mass_rate(arm, q, qdot)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

// Energy is conserved by the unforced chain: RK4 over 1 s at dt = 1e-4.
TEST(JointSpaceDynamics, UnforcedEnergyConserved) {
  const AgentModel arm = canonical_arm();
  auto accel = [&](const VectorXd& q, const VectorXd& qd) -> VectorXd {
    const DynamicsTerms t = joint_space_dynamics(arm, q, qd);
    return t.mass.ldlt().solve(-t.coriolis * qd - t.gravity);
  };
  auto energy = [&](const VectorXd& q, const VectorXd& qd) {
    return 0.5 * qd.dot(joint_space_dynamics(arm, q, qd).mass * qd) + potential_energy(arm, q);
  };
  VectorXd q(6), qd(6);
  q << 0.2, -0.4, 0.9, 0.3, -0.5, 0.1;
  qd << 0.5, -0.3, 0.8, 1.0, -0.6, 0.4;
  const double e0 = energy(q, qd);
  const double dt = 1e-4;
  double drift = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const VectorXd k1q = qd, k1v = accel(q, qd);
    const VectorXd k2q = qd + 0.5 * dt * k1v, k2v = accel(q + 0.5 * dt * k1q, k2q);
    const VectorXd k3q = qd + 0.5 * dt * k2v, k3v = accel(q + 0.5 * dt * k2q, k3q);
    const VectorXd k4q = qd + dt * k3v, k4v = accel(q + dt * k3q, k4q);
    q += dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    qd += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    drift = std::max(drift, std::abs(energy(q, qd) - e0));
  }
  EXPECT_LT(drift, 1e-6);
}

TEST(TaskSpaceDynamics, BodyAtRestIsBlockDiagonal) {
  std::mt19937_64 rng(29);
  InertialParams p = box_inertial(1.7, Vector3d::Zero(), {0.1, 0.2, 0.15});
  const AgentModel body = AgentModel::task_space_body({p});
  const VectorXd q = random_body_configuration(rng);
  const DynamicsTerms t = task_space_dynamics(body, q, VectorXd::Zero(6));
  const Matrix3d r = spatial::quat_to_rotation(UnitQuaternion(Vector4d(q.tail<4>()))).matrix();
  Matrix6d expected = Matrix6d::Zero();
  expected.topLeftCorner<3, 3>() = 1.7 * Matrix3d::Identity();
  expected.bottomRightCorner<3, 3>() = r * p.inertia() * r.transpose();
  EXPECT_LT((t.mass - expected).cwiseAbs().maxCoeff(), 1e-15);
  Vector6d g;
  g << 0, 0, 1.7 * 9.81, 0, 0, 0;
  EXPECT_LT((t.gravity - g).norm(), 1e-14);
}

TEST(TaskSpaceDynamics, BodyMatchesNewtonEulerAboutOffsetPoint) {
  std::mt19937_64 rng(30);
  for (int t = 0; t < 100; ++t) {
    const InertialParams p = random_inertial(rng, 0.2);
    const AgentModel body = AgentModel::task_space_body({p}, random_vector(rng, 10.0));
    const VectorXd q = random_body_configuration(rng);
    const Vector6d nu = random_vector6(rng, 2.0);
    const Vector6d nu_dot = random_vector6(rng, 4.0);
    const Matrix3d r = spatial::quat_to_rotation(UnitQuaternion(Vector4d(q.tail<4>()))).matrix();
    const Vector3d c = r * p.first_moment / p.mass;
    const Matrix3d ic = r * p.inertia_about_com() * r.transpose();
    const Vector3d w = nu.tail<3>(), wd = nu_dot.tail<3>();
    // Newton-Euler at the center of mass, then shift the moment to the origin.
    const Vector3d a_c = nu_dot.head<3>() + wd.cross(c) + w.cross(w.cross(c));
    const Vector3d f = p.mass * (a_c - body.gravity());
    const Vector3d n = ic * wd + w.cross(ic * w) + c.cross(f);
    Vector6d expected;
    expected << f, n;
    const DynamicsTerms d = task_space_dynamics(body, q, nu);
    ASSERT_LT((d.mass * nu_dot + d.coriolis * nu + d.gravity - expected).norm(), 1e-11);
  }
}

struct SkewCase {
  AgentModel agent;
  VectorXd q, qdot;
};

// x^T (Mdot - 2C) x with Mdot from a central difference along qdot.
double skew_residual(const AgentModel& agent, const VectorXd& q, const VectorXd& qdot, const Vector6d& x,
                     bool task_space) {
  const double h = 1e-6;
  auto terms = [&](const VectorXd& qq) {
    return task_space ? task_space_dynamics(agent, qq, qdot) : joint_space_dynamics(agent, qq, qdot);
  };
  const VectorXd qp = advance(agent, q, qdot, h);
  const VectorXd qm = advance(agent, q, qdot, -h);
  // For a chain in task space the twist is J qdot; hold qdot fixed.
  const Matrix6d m_dot = (terms(qp).mass - terms(qm).mass) / (2 * h);
  const Matrix6d c = terms(q).coriolis;
  return x.dot((m_dot - 2.0 * c) * x);
}

TEST(AgentDynamics, MassMatricesArePositiveDefiniteAndSkewHolds) {
  std::mt19937_64 rng(31);
  const AgentModel arm = canonical_arm();
  for (int t = 0; t < 100; ++t) {
    const VectorXd q = random_arm_configuration(arm, rng, 100.0);
    const VectorXd qdot = random_vector6(rng, 1.5);
    const Vector6d x = random_vector6(rng);
    const DynamicsTerms js = joint_space_dynamics(arm, q, qdot);
    const DynamicsTerms ts = task_space_dynamics(arm, q, qdot);
    ASSERT_GT(min_eigenvalue(js.mass), 0.0);
    ASSERT_GT(min_eigenvalue(ts.mass), 0.0);
    EXPECT_LT((js.mass - js.mass.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_LT(std::abs(skew_residual(arm, q, qdot, x, false)), 1e-7 * x.squaredNorm());
    ASSERT_LT(std::abs(skew_residual(arm, q, qdot, x, true)), 1e-6 * x.squaredNorm());

    const AgentModel body = random_body(rng);
    const VectorXd qb = random_body_configuration(rng);
    ASSERT_GT(min_eigenvalue(task_space_dynamics(body, qb, qdot).mass), 0.0);
    ASSERT_LT(std::abs(skew_residual(body, qb, qdot, x, true)), 1e-7 * x.squaredNorm());
  }
}

TEST(TaskSpaceDynamics, RefusesSingularJacobian) {
  const AgentModel arm = canonical_arm();
  // Home pose aligns joints 4 and 6.
  EXPECT_THROW(task_space_dynamics(arm, VectorXd::Zero(6), VectorXd::Zero(6)), SingularityError);
}

TEST(ObjectDynamics, SphericalAndStaticCases) {
  ObjectModel obj;
  obj.mass = 0.8;
  obj.inertia_sym << 0.02, 0.02, 0.02, 0, 0, 0;
  ObjectState s;
  s.orientation = UnitQuaternion::from_axis_angle(Vector3d(1, 2, 3), 0.7);
  s.twist.angular = {0.4, -1.1, 2.0};
  s.twist.linear = {1, 2, 3};
  const DynamicsTerms t = object_dynamics_terms(obj, s);
  EXPECT_LT((t.coriolis * s.twist.vector()).norm(), 1e-15);
  s.twist = {};
  const DynamicsTerms rest = object_dynamics_terms(obj, s);
  EXPECT_EQ(rest.coriolis * s.twist.vector(), Vector6d::Zero());
  EXPECT_LT((rest.gravity - Vector6d(0, 0, 0.8 * 9.81, 0, 0, 0)).norm(), 1e-15);
}

TEST(ObjectDynamics, GyroscopicTermMatchesFiniteDifference) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 50; ++t) {
    ObjectModel obj;
    obj.inertia_sym = random_inertial(rng, 0.0).inertia_sym;
    ObjectState s;
    s.orientation = random_quaternion(rng);
    s.twist.angular = random_vector(rng, 2.0);
    const Vector3d w = s.twist.angular;
    const double h = 1e-6;
    auto iw = [&](double dt) {
      const UnitQuaternion q = dt > 0 ? spatial::integrate_quat(s.orientation, w, dt)
                                      : spatial::integrate_quat(s.orientation, -w, -dt);
      const Matrix3d r = spatial::quat_to_rotation(q).matrix();
      return Matrix3d(r * inertia_from_sym(obj.inertia_sym) * r.transpose());
    };
    // With constant omega, d/dt(I_w omega) = Idot_w omega = omega x I_w omega.
    const Vector3d fd = (iw(h) - iw(-h)) * w / (2 * h);
    const Vector3d c_term = (object_dynamics_terms(obj, s).coriolis * s.twist.vector()).tail<3>();
    EXPECT_LT((fd - c_term).norm(), 1e-7);
  }
}

TEST(ObjectDynamics, SkewAndPositiveDefinite) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 100; ++t) {
    ObjectModel obj;
    obj.mass = 1.3;
    obj.inertia_sym = random_inertial(rng, 0.0).inertia_sym;
    ObjectState s;
    s.orientation = random_quaternion(rng);
    s.twist = spatial::Twist::from_vector(random_vector6(rng, 2.0));
    const double h = 1e-6;
    ObjectState sp = s, sm = s;
    sp.orientation = spatial::integrate_quat(s.orientation, s.twist.angular, h);
    sm.orientation = spatial::integrate_quat(s.orientation, -s.twist.angular, h);
    const Matrix6d m_dot = (object_dynamics_terms(obj, sp).mass - object_dynamics_terms(obj, sm).mass) / (2 * h);
    const DynamicsTerms d = object_dynamics_terms(obj, s);
    const Vector6d x = random_vector6(rng);
    ASSERT_GT(min_eigenvalue(d.mass), 0.0);
    ASSERT_LT(std::abs(x.dot((m_dot - 2 * d.coriolis) * x)), 1e-7 * x.squaredNorm());
  }
}

TEST(Regressor, ObjectColumnsAndExactness) {
  std::mt19937_64 rng(34);
  const Vector3d gravity = kDefaultGravity;
  ObjectState s;
  s.orientation = random_quaternion(rng);
  const Matrix67d rest = object_regressor(gravity, s, Vector6d::Zero(), Vector6d::Zero());
  Vector6d mass_col;
  mass_col << -gravity, Vector3d::Zero();
  EXPECT_EQ(rest.col(0), mass_col);
  EXPECT_EQ(rest.rightCols<6>().cwiseAbs().maxCoeff(), 0.0);

  for (int t = 0; t < 1000; ++t) {
    ObjectModel obj;
    obj.mass = std::abs(random_vector(rng, 3.0).x()) + 0.1;
    obj.inertia_sym = random_vector6(rng, 0.1);
    ObjectState st;
    st.orientation = random_quaternion(rng);
    st.twist = spatial::Twist::from_vector(random_vector6(rng, 2.0));
    const Vector6d v = random_vector6(rng, 2.0), vd = random_vector6(rng, 5.0);
    const DynamicsTerms d = object_dynamics_terms(obj, st);
    const Vector6d direct = d.mass * vd + d.coriolis * v + d.gravity;
    ASSERT_LT((object_regressor(gravity, st, v, vd) * obj.parameters() - direct).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Regressor, AgentExactnessChainAndBody) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 1000; ++t) {
    const bool chain = t % 2 == 0;
    const AgentModel base_agent = chain ? canonical_arm() : random_body(rng);
    VectorXd theta(base_agent.parameter_count());
    for (int k = 0; k < theta.size(); ++k) theta[k] = random_vector(rng).x();
    const AgentModel agent = base_agent.with_parameters(theta);
    const VectorXd q = chain ? random_arm_configuration(agent, rng) : random_body_configuration(rng);
    const VectorXd qdot = random_vector6(rng, 1.5);
    const Vector3d p_oe = random_vector(rng, 0.3);
    Matrix6d j_o = Matrix6d::Identity();
    j_o.topRightCorner<3, 3>() = spatial::skew(p_oe);
    Matrix6d j_o_dot = Matrix6d::Zero();
    j_o_dot.topRightCorner<3, 3>() = spatial::skew(random_vector(rng));
    const Vector6d v = random_vector6(rng, 2.0), vd = random_vector6(rng, 5.0);

    const DynamicsTerms d = task_space_dynamics(agent, q, qdot);
    const Vector6d direct = j_o.transpose() * (d.mass * (j_o * vd + j_o_dot * v) + d.coriolis * (j_o * v) + d.gravity);
    const MatrixXd y = agent_regressor(agent, q, qdot, j_o, j_o_dot, v, vd);
    ASSERT_EQ(y.cols(), chain ? 60 : 10);
    ASSERT_LT((y * theta - direct).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + direct.norm()));
  }
  const AgentModel arm = canonical_arm();
  const VectorXd q = random_arm_configuration(arm, rng);
  const MatrixXd y = agent_task_regressor(arm, q, random_vector6(rng), random_vector6(rng), random_vector6(rng));
  EXPECT_EQ((y * VectorXd::Zero(60)).norm(), 0.0);
}

// With zero first moment the body regressor is the object regressor with the
// three first-moment columns inserted.
TEST(Regressor, BodyReducesToObjectPattern) {
  std::mt19937_64 rng(36);
  const AgentModel body = random_body(rng);
  for (int t = 0; t < 50; ++t) {
    const VectorXd q = random_body_configuration(rng);
    const Vector6d qdot = random_vector6(rng, 2.0);
    const Vector6d v = random_vector6(rng, 2.0), vd = random_vector6(rng, 3.0);
    ObjectState s;
    s.orientation = UnitQuaternion(Vector4d(q.tail<4>()));
    s.twist = spatial::Twist::from_vector(qdot);
    const Matrix67d y_o = object_regressor(body.gravity(), s, v, vd);
    const MatrixXd h = agent_task_regressor(body, q, qdot, v, vd);
    EXPECT_LT((h.col(0) - y_o.col(0)).norm(), 1e-13);
    EXPECT_LT((h.rightCols<6>() - y_o.rightCols<6>()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

}  // namespace
}  // namespace coop::model
