#include "coop/sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coop/errors.hpp"

namespace coop::sim {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("simulation config: " + msg);
}

int object_block() { return 13; }  // p(3), xi(4), v(6)

}  // namespace

void SimConfig::validate() const {
  const int n = agent_count();
  require(n >= 1, "at least one agent is required");
  require(grasp.size() == n, "grasp offsets must match the number of agents");
  require(trajectory != nullptr, "a desired trajectory is required");
  object.validate();
  if (controller_object) controller_object->validate();
  for (const AgentModel& a : agents) a.validate();
  gains.validate(n, mode);
  require(internal_force.size() == 0 || internal_force.size() == 6 * n, "internal_force must have 6N entries");
  require(internal_force.allFinite(), "internal_force must be finite");
  require(std::isfinite(duration) && duration > 0.0, "duration must be positive");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(log_every >= 1, "log_every must be at least 1");
  require(velocity_bound > 0.0, "velocity_bound must be positive");
  require(std::isfinite(estimate_scale), "estimate_scale must be finite");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kConverged:
      return "converged";
    case Status::kNotConverged:
      return "not_converged";
    case Status::kDiverged:
      return "diverged";
    case Status::kSingular:
      return "singular";
  }
  return "unknown";
}

int exit_code(Status s) {
  switch (s) {
    case Status::kConverged:
      return 0;
    case Status::kNotConverged:
      return 4;
    case Status::kDiverged:
      return 2;
    case Status::kSingular:
      return 3;
  }
  return 1;
}

SimState initial_state(const SimConfig& config, const ObjectState& object,
                       const std::vector<VectorXd>& chain_seeds) {
  config.validate();
  SimState s;
  s.object = object;
  const model::Pose object_pose{object.position, object.orientation};
  for (int i = 0; i < config.agent_count(); ++i) {
    const AgentModel& agent = config.agents[i];
    const model::Pose target = config.grasp.effector_pose(i, object_pose);
    if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
      s.q.push_back(model::body_configuration(target));
    } else {
      const VectorXd seed = i < static_cast<int>(chain_seeds.size()) ? chain_seeds[i]
                                                                      : VectorXd::Zero(agent.configuration_dim());
      s.q.push_back(model::inverse_kinematics(agent, target, seed));
    }
  }
  if (config.mode == ControllerMode::kAdaptive) {
    const ObjectModel& controller_object = config.controller_object.value_or(config.object);
    for (const AgentModel& agent : config.agents) {
      s.adaptive.theta_hat.push_back(config.estimate_scale * agent.parameters());
      s.adaptive.theta_o_hat.push_back(config.estimate_scale * controller_object.parameters());
    }
  }
  return s;
}

ClosedLoop::ClosedLoop(SimConfig config) : config_(std::move(config)) {
  config_.validate();
  const ObjectModel controller_object = config_.controller_object.value_or(config_.object);
  for (int i = 0; i < config_.agent_count(); ++i) {
    controllers_.emplace_back(i, config_.agents[i], config_.grasp.offsets, controller_object, config_.gains,
                              config_.mode, config_.internal_force);
    true_theta_.push_back(config_.agents[i].parameters());
  }
}

Evaluation ClosedLoop::evaluate(const SimState& state, const std::vector<AgentCommand>* held) const {
  const int n = config_.agent_count();
  const Vector6d v = state.object.twist.vector();
  if (!v.allFinite() || !state.object.position.allFinite()) {
    throw DivergenceError("non-finite object state at t = " + std::to_string(state.t));
  }
  if (v.norm() > config_.velocity_bound) {
    std::ostringstream msg;
    msg << "object velocity " << v.norm() << " exceeds the bound " << config_.velocity_bound << " at t = "
        << state.t;
    throw DivergenceError(msg.str());
  }

  Evaluation ev;
  ev.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    const AgentModel& agent = config_.agents[i];
    const Vector3d p_oe = config_.grasp.object_to_effector(i, state.object.orientation);
    const Vector6d v_i = coupling::object_agent_jacobian(p_oe) * v;
    ev.agents[i].q = state.q[i];
    if (agent.kind() == AgentModel::Kind::kTaskSpaceBody) {
      ev.agents[i].qdot = v_i;
    } else {
      const Matrix6d j = model::geometric_jacobian(agent, state.q[i]);
      const double cond = model::condition_number(j);
      ev.max_condition = std::max(ev.max_condition, cond);
      if (!(cond <= model::kSingularCondition)) {
        std::ostringstream msg;
        msg << "agent " << i << " Jacobian is singular (condition number " << cond << ") at t = " << state.t;
        throw SingularityError(msg.str(), cond);
      }
      ev.agents[i].qdot = j.partialPivLu().solve(v_i);
    }
  }

  ev.coupled = coupling::coupled_terms(config_.object, state.object, config_.agents, ev.agents, config_.grasp);
  ev.target = config_.trajectory->at(state.t);
  ev.tracking = control::evaluate_tracking(state.object, ev.target, config_.gains);

  if (held != nullptr) {
    ev.commands = *held;
  } else {
    ev.commands.reserve(n);
    const bool adaptive = config_.mode == ControllerMode::kAdaptive;
    for (int i = 0; i < n; ++i) {
      ev.commands.push_back(controllers_[i].compute(ev.agents[i], ev.target,
                                                    adaptive ? &state.adaptive.theta_hat[i] : nullptr,
                                                    adaptive ? &state.adaptive.theta_o_hat[i] : nullptr));
    }
  }

  Vector6d force = -ev.coupled.coriolis * v - ev.coupled.gravity;
  for (int i = 0; i < n; ++i) force += ev.coupled.agents[i].j_o.transpose() * ev.commands[i].u;
  ev.v_dot = ev.coupled.mass.ldlt().solve(force);
  if (!ev.v_dot.allFinite()) throw DivergenceError("non-finite object acceleration at t = " + std::to_string(state.t));

  std::vector<Vector6d> v_i(n), u(n);
  ev.v_dot_i.resize(n);
  for (int i = 0; i < n; ++i) {
    const coupling::AgentCoupling& a = ev.coupled.agents[i];
    v_i[i] = a.j_o * v;
    ev.v_dot_i[i] = a.j_o * ev.v_dot + a.j_o_dot * v;
    u[i] = ev.commands[i].u;
  }
  ev.contact = coupling::contact_wrenches(ev.coupled, v_i, u, ev.v_dot_i);
  return ev;
}

VectorXd ClosedLoop::pack(const SimState& state) const {
  int size = object_block();
  for (const VectorXd& q : state.q) size += static_cast<int>(q.size());
  for (const VectorXd& th : state.adaptive.theta_hat) size += static_cast<int>(th.size());
  size += 7 * static_cast<int>(state.adaptive.theta_o_hat.size());

  VectorXd x(size);
  x.segment<3>(0) = state.object.position;
  x.segment<4>(3) = state.object.orientation.coeffs();
  x.segment<6>(7) = state.object.twist.vector();
  int k = object_block();
  for (const VectorXd& q : state.q) {
    x.segment(k, q.size()) = q;
    k += static_cast<int>(q.size());
  }
  for (const VectorXd& th : state.adaptive.theta_hat) {
    x.segment(k, th.size()) = th;
    k += static_cast<int>(th.size());
  }
  for (const model::Vector7d& th : state.adaptive.theta_o_hat) {
    x.segment<7>(k) = th;
    k += 7;
  }
  return x;
}

SimState ClosedLoop::unpack(const VectorXd& x, double t) const {
  SimState s;
  s.t = t;
  if (!x.allFinite()) throw DivergenceError("non-finite state at t = " + std::to_string(t));
  s.object.position = x.segment<3>(0);
  s.object.orientation = spatial::UnitQuaternion(Vector4d(x.segment<4>(3)));
  s.object.twist = spatial::Twist::from_vector(x.segment<6>(7));
  int k = object_block();
  for (const AgentModel& agent : config_.agents) {
    VectorXd q = x.segment(k, agent.configuration_dim());
    model::normalize_configuration(agent, q);
    s.q.push_back(std::move(q));
    k += agent.configuration_dim();
  }
  if (config_.mode == ControllerMode::kAdaptive) {
    for (const AgentModel& agent : config_.agents) {
      s.adaptive.theta_hat.push_back(x.segment(k, agent.parameter_count()));
      k += agent.parameter_count();
    }
    for (int i = 0; i < config_.agent_count(); ++i) {
      s.adaptive.theta_o_hat.push_back(x.segment<7>(k));
      k += 7;
    }
  }
  return s;
}

VectorXd ClosedLoop::rate(const SimState& state, const Evaluation& eval) const {
  VectorXd d(pack(state).size());
  d.segment<3>(0) = state.object.twist.linear;
  d.segment<4>(3) = spatial::quat_rate(state.object.orientation, state.object.twist.angular);
  d.segment<6>(7) = eval.v_dot;
  int k = object_block();
  for (int i = 0; i < config_.agent_count(); ++i) {
    const VectorXd qd = model::configuration_rate(config_.agents[i], state.q[i], eval.agents[i].qdot);
    d.segment(k, qd.size()) = qd;
    k += static_cast<int>(qd.size());
  }
  if (config_.mode == ControllerMode::kAdaptive) {
    for (int i = 0; i < config_.agent_count(); ++i) {
      const VectorXd& th = eval.commands[i].rates.theta_dot;
      d.segment(k, th.size()) = th;
      k += static_cast<int>(th.size());
    }
    for (int i = 0; i < config_.agent_count(); ++i) {
      d.segment<7>(k) = eval.commands[i].rates.theta_o_dot;
      k += 7;
    }
  }
  return d;
}

VectorXd rk4_step(const VectorXd& x, double t, double dt,
                  const std::function<VectorXd(const VectorXd&, double)>& derivative) {
  const VectorXd k1 = derivative(x, t);
  const VectorXd k2 = derivative(x + 0.5 * dt * k1, t + 0.5 * dt);
  const VectorXd k3 = derivative(x + 0.5 * dt * k2, t + 0.5 * dt);
  const VectorXd k4 = derivative(x + dt * k3, t + dt);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SimState ClosedLoop::step(const SimState& state, double dt, const Evaluation* start) const {
  Evaluation first;
  if (start == nullptr) {
    first = evaluate(state);
    start = &first;
  }
  const std::vector<AgentCommand>* held = config_.zero_order_hold ? &start->commands : nullptr;
  const VectorXd x = pack(state);
  const VectorXd k1 = rate(state, *start);
  auto f = [&](const VectorXd& y, double t) {
    const SimState s = unpack(y, t);
    return rate(s, evaluate(s, held));
  };
  const VectorXd k2 = f(x + 0.5 * dt * k1, state.t + 0.5 * dt);
  const VectorXd k3 = f(x + 0.5 * dt * k2, state.t + 0.5 * dt);
  const VectorXd k4 = f(x + dt * k3, state.t + dt);
  // unpack renormalizes the quaternions after the step.
  return unpack(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), state.t + dt);
}

std::vector<double> finite_difference_rate(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / h;
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
    } else if (i == 0) {
      d[i] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    } else {
      d[i] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    }
  }
  return d;
}

Drift rigidity_drift(const SimConfig& config, const SimState& state) {
  Drift d;
  for (int i = 0; i < config.agent_count(); ++i) {
    const model::Pose effector = model::forward_kinematics(config.agents[i], state.q[i]);
    const model::Pose implied = config.grasp.object_pose(i, effector);
    d.position = std::max(d.position, (implied.position - state.object.position).norm());
    d.orientation =
        std::max(d.orientation, spatial::rotation_angle_between(implied.orientation, state.object.orientation));
  }
  return d;
}

namespace {

control::ParameterErrors parameter_errors(const SimConfig& config, const std::vector<VectorXd>& true_theta,
                                          const SimState& s) {
  control::ParameterErrors p;
  const model::Vector7d theta_o = config.object.parameters();
  for (std::size_t i = 0; i < true_theta.size(); ++i) {
    p.e_theta.push_back(true_theta[i] - s.adaptive.theta_hat[i]);
    p.e_theta_o.push_back(theta_o - s.adaptive.theta_o_hat[i]);
  }
  p.gamma = config.gains.gamma;
  return p;
}

}  // namespace

SimTrace run_scenario(const SimConfig& config, const SimState& initial) {
  const ClosedLoop loop(config);
  const int n = config.agent_count();
  const bool adaptive = config.mode == ControllerMode::kAdaptive;
  std::vector<VectorXd> true_theta;
  for (const AgentModel& a : config.agents) true_theta.push_back(a.parameters());

  SimTrace trace;
  trace.dt = config.dt;
  trace.agents = n;
  const long steps = std::lround(config.duration / config.dt);

  SimState s = initial;
  bool completed = false;
  for (long k = 0;; ++k) {
    Evaluation ev;
    try {
      ev = loop.evaluate(s);
    } catch (const SingularityError& e) {
      trace.status = Status::kSingular;
      trace.message = e.what();
      break;
    } catch (const DivergenceError& e) {
      trace.status = Status::kDiverged;
      trace.message = e.what();
      break;
    }
    if (ev.max_condition > model::kNearSingularCondition) ++trace.near_singular_steps;

    const control::ErrorState& err = ev.tracking.err;
    double v = 0.0;
    double v_printed = 0.0;
    if (adaptive) {
      const control::ParameterErrors pe = parameter_errors(config, true_theta, s);
      v = control::lyapunov_value(err, ev.coupled.mass, pe);
      v_printed = control::lyapunov_value(err, ev.coupled.mass, pe, control::OrientationTerm::kUnitConstraintResidual);
    } else {
      v = control::lyapunov_value(err, ev.coupled.mass);
      v_printed = control::lyapunov_value(err, ev.coupled.mass, control::OrientationTerm::kUnitConstraintResidual);
    }
    const double rate = control::lyapunov_rate(err, config.gains);
    const double rate_linear = control::lyapunov_rate(err, config.gains, control::EtaPower::kLinear);
    trace.step_t.push_back(s.t);
    trace.step_v.push_back(v);
    trace.step_v_rate.push_back(rate);
    trace.step_v_rate_linear.push_back(rate_linear);

    const Drift drift = rigidity_drift(config, s);
    trace.max_drift_position = std::max(trace.max_drift_position, drift.position);
    trace.max_drift_orientation = std::max(trace.max_drift_orientation, drift.orientation);

    if (k % config.log_every == 0) {
      TraceRow row;
      row.t = s.t;
      row.p = s.object.position;
      row.quat = s.object.orientation.coeffs();
      row.v = s.object.twist.vector();
      row.e_p = err.e_p;
      row.e_eta = err.e_eta();
      row.e_eps = err.e_eps();
      row.e_v = err.e_v;
      std::vector<Vector3d> p_oe;
      VectorXd f_stack(6 * n);
      Vector6d internal_sum = Vector6d::Zero();
      for (int i = 0; i < n; ++i) {
        row.u.push_back(ev.commands[i].u);
        row.tau.push_back(ev.commands[i].tau);
        row.f.push_back(ev.contact[i]);
        p_oe.push_back(ev.coupled.agents[i].p_oe);
        f_stack.segment<6>(6 * i) = ev.contact[i];
        internal_sum += ev.coupled.agents[i].j_o.transpose() * ev.commands[i].u_internal;
      }
      row.V = v;
      row.f_int_norm = (coupling::internal_force_projector(p_oe) * f_stack).norm();
      row.rigidity_drift = drift.combined();
      trace.rows.push_back(std::move(row));

      RowDiagnostics diag;
      diag.v_rate = rate;
      diag.v_rate_linear = rate_linear;
      diag.v_printed = v_printed;
      diag.drift_position = drift.position;
      diag.drift_orientation = drift.orientation;
      diag.internal_residual = internal_sum.norm();
      double sq = 0.0;
      for (const VectorXd& th : s.adaptive.theta_hat) {
        sq += th.squaredNorm();
        diag.theta_max_abs = std::max(diag.theta_max_abs, th.cwiseAbs().maxCoeff());
      }
      diag.theta_norm = std::sqrt(sq);
      trace.diagnostics.push_back(diag);
    }

    if (k >= steps) {
      completed = true;
      break;
    }
    try {
      s = loop.step(s, config.dt, &ev);
    } catch (const SingularityError& e) {
      trace.status = Status::kSingular;
      trace.message = e.what();
      break;
    } catch (const DivergenceError& e) {
      trace.status = Status::kDiverged;
      trace.message = e.what();
      break;
    }
  }

  trace.step_vdot_fd = finite_difference_rate(trace.step_v, config.dt);
  for (TraceRow& row : trace.rows) {
    const auto idx = static_cast<std::size_t>(std::lround(row.t / config.dt));
    if (idx < trace.step_vdot_fd.size()) row.Vdot_fd = trace.step_vdot_fd[idx];
  }
  trace.rigidity_flag = std::max(trace.max_drift_position, trace.max_drift_orientation) > config.rigidity_tolerance;
  trace.final_theta_hat = s.adaptive.theta_hat;
  trace.final_theta_o_hat = s.adaptive.theta_o_hat;

  if (completed) {
    const TerminalStats stats = terminal_stats(trace.rows);
    const bool ok = stats.max_e_p < config.convergence_tolerance && stats.max_e_eps < config.convergence_tolerance;
    trace.status = ok ? Status::kConverged : Status::kNotConverged;
    if (!ok) {
      std::ostringstream msg;
      msg << "terminal error above " << config.convergence_tolerance << " (max |e_p| " << stats.max_e_p
          << ", max |e_eps| " << stats.max_e_eps << ")";
      trace.message = msg.str();
    }
  }
  return trace;
}

TerminalStats terminal_stats(const std::vector<TraceRow>& rows) {
  TerminalStats st;
  if (rows.empty()) return st;
  st.window_start = 0.8 * rows.back().t;
  int count = 0;
  for (const TraceRow& r : rows) {
    if (r.t < st.window_start) continue;
    const double ep = r.e_p.norm();
    const double ee = r.e_eps.norm();
    const double ev = r.e_v.norm();
    st.max_e_p = std::max(st.max_e_p, ep);
    st.max_e_eps = std::max(st.max_e_eps, ee);
    st.max_e_v = std::max(st.max_e_v, ev);
    st.rms_e_p += ep * ep;
    st.rms_e_eps += ee * ee;
    st.rms_e_v += ev * ev;
    ++count;
  }
  if (count > 0) {
    st.rms_e_p = std::sqrt(st.rms_e_p / count);
    st.rms_e_eps = std::sqrt(st.rms_e_eps / count);
    st.rms_e_v = std::sqrt(st.rms_e_v / count);
  }
  st.final_abs_e_eta = std::abs(rows.back().e_eta);
  return st;
}

LyapunovReport lyapunov_monitor(const SimTrace& trace, const MonitorOptions& options) {
  LyapunovReport r;
  const std::size_t n = trace.step_v.size();
  r.steps = static_cast<int>(n);
  if (n == 0) return r;
  r.tolerance = options.step_tolerance_factor * std::abs(trace.step_v.front());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double inc = trace.step_v[k + 1] - trace.step_v[k];
    r.max_increase = std::max(r.max_increase, inc);
    if (inc > r.tolerance) ++r.violations;
  }
  double scale = 0.0;
  for (double d : trace.step_v_rate) scale = std::max(scale, std::abs(d));
  const double floor = options.rate_floor * scale;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double a = trace.step_v_rate[k];
    if (std::abs(a) < floor || std::abs(a) == 0.0) continue;
    ++r.rate_samples;
    r.max_rate_error = std::max(r.max_rate_error, std::abs(trace.step_vdot_fd[k] - a) / std::abs(a));
    const double lin = trace.step_v_rate_linear[k];
    if (lin != 0.0) {
      r.max_rate_error_linear = std::max(r.max_rate_error_linear, std::abs(trace.step_vdot_fd[k] - lin) / std::abs(lin));
    }
  }
  return r;
}

}  // namespace coop::sim
