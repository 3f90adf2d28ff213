#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coop/control.hpp"
#include "coop/coupling.hpp"
#include "coop/model.hpp"
#include "coop/trajectory.hpp"

namespace coop::sim {

using control::AdaptiveState;
using control::AgentCommand;
using control::ControllerGains;
using control::ControllerMode;
using control::Trajectory;
using coupling::AgentState;
using coupling::GraspGeometry;
using model::AgentModel;
using model::ObjectModel;
using model::ObjectState;
using model::VectorXd;

struct SimConfig {
  ObjectModel object;               // ground truth
  std::vector<AgentModel> agents;   // ground truth
  GraspGeometry grasp;
  std::shared_ptr<const Trajectory> trajectory;
  ControllerGains gains;
  ControllerMode mode = ControllerMode::kNonAdaptive;
  // Object model handed to the controllers; the truth when empty. A scaled
  // mass models a parameter mismatch.
  std::optional<ObjectModel> controller_object;
  // Adaptive estimates start at estimate_scale times the true parameters.
  double estimate_scale = 0.5;
  // Desired internal wrenches, 6 per agent in the object frame; empty for none.
  VectorXd internal_force;

  double duration = 1.0;
  double dt = 1e-3;
  int log_every = 1;
  double velocity_bound = 1e3;
  double rigidity_tolerance = 1e-6;
  double convergence_tolerance = 1e-3;
  // Recompute the control once per step and hold it over the RK4 stages.
  bool zero_order_hold = false;

  int agent_count() const { return static_cast<int>(agents.size()); }
  // Throws std::invalid_argument on inconsistent sizes or invalid models.
  void validate() const;
};

struct SimState {
  double t = 0.0;
  ObjectState object;
  std::vector<VectorXd> q;  // agent configurations
  AdaptiveState adaptive;   // empty in non-adaptive mode
};

// Agents placed rigidly on `object` through the grasp, joint rates
// consistent with its twist. Serial chains are placed by inverse kinematics
// seeded from `chain_seeds` (zeros when absent). Adaptive estimates start at
// estimate_scale times the truth.
SimState initial_state(const SimConfig& config, const ObjectState& object,
                       const std::vector<VectorXd>& chain_seeds = {});

// Full closed-loop evaluation at one state.
struct Evaluation {
  coupling::CoupledTerms coupled;
  std::vector<AgentState> agents;       // q, qdot (qdot = J^-1 J_O v_O)
  std::vector<AgentCommand> commands;
  Vector6d v_dot = Vector6d::Zero();    // object acceleration
  std::vector<Vector6d> v_dot_i;        // end-effector accelerations
  std::vector<Vector6d> contact;        // f_i
  control::TrajectoryPoint target;
  control::Tracking tracking;           // from the true object state
  double max_condition = 1.0;           // largest agent Jacobian condition number
};

enum class Status { kConverged, kNotConverged, kDiverged, kSingular };
std::string to_string(Status s);
// 0 converged, 4 not converged, 2 diverged, 3 singular.
int exit_code(Status s);

// Closed-loop ODE of the object, agents and (adaptive mode) estimates.
class ClosedLoop {
 public:
  explicit ClosedLoop(SimConfig config);

  const SimConfig& config() const { return config_; }

  // Evaluates the dynamics. With `held` the given commands replace the
  // controllers' output. Throws SingularityError / DivergenceError.
  Evaluation evaluate(const SimState& state, const std::vector<AgentCommand>* held = nullptr) const;

  VectorXd pack(const SimState& state) const;
  SimState unpack(const VectorXd& x, double t) const;
  // d/dt of pack(state) given an evaluation at that state.
  VectorXd rate(const SimState& state, const Evaluation& eval) const;

  // One RK4 step. `start` may carry an evaluation at `state` to reuse.
  SimState step(const SimState& state, double dt, const Evaluation* start = nullptr) const;

 private:
  SimConfig config_;
  std::vector<control::AgentController> controllers_;
  std::vector<VectorXd> true_theta_;
};

// Classical RK4 on a flat vector.
VectorXd rk4_step(const VectorXd& x, double t, double dt,
                  const std::function<VectorXd(const VectorXd&, double)>& derivative);

// Central differences of a uniformly sampled series: 5-point stencil in the
// interior, 3-point next to the ends, second-order one-sided at the ends.
std::vector<double> finite_difference_rate(const std::vector<double>& y, double h);

struct TraceRow {
  double t = 0.0;
  Vector3d p = Vector3d::Zero();
  Vector4d quat = Vector4d(1, 0, 0, 0);
  Vector6d v = Vector6d::Zero();
  Vector3d e_p = Vector3d::Zero();
  double e_eta = 1.0;
  Vector3d e_eps = Vector3d::Zero();
  Vector6d e_v = Vector6d::Zero();
  std::vector<Vector6d> u, tau, f;
  double V = 0.0;
  double Vdot_fd = 0.0;
  double f_int_norm = 0.0;
  double rigidity_drift = 0.0;
};

// Extra per-row diagnostics not written to the CSV.
struct RowDiagnostics {
  double v_rate = 0.0;            // analytic rate, e_eta squared
  double v_rate_linear = 0.0;     // analytic rate, e_eta to the first power
  double v_printed = 0.0;         // V with the unit-constraint residual term
  double drift_position = 0.0;
  double drift_orientation = 0.0;
  double internal_residual = 0.0;  // |G^T f_int|
  double theta_norm = 0.0;         // |theta_hat| over all agents
  double theta_max_abs = 0.0;
};

struct SimTrace {
  std::vector<TraceRow> rows;
  std::vector<RowDiagnostics> diagnostics;
  // Every integration step (not only logged rows).
  std::vector<double> step_t, step_v, step_v_rate, step_v_rate_linear, step_vdot_fd;
  double dt = 0.0;
  int agents = 0;
  Status status = Status::kConverged;
  std::string message;
  int near_singular_steps = 0;
  double max_drift_position = 0.0;
  double max_drift_orientation = 0.0;
  bool rigidity_flag = false;
  std::vector<VectorXd> final_theta_hat;
  std::vector<model::Vector7d> final_theta_o_hat;
};

// Integrates `config` from `initial` for config.duration. Divergence and
// singularity end the run early with the corresponding status.
SimTrace run_scenario(const SimConfig& config, const SimState& initial);

struct TerminalStats {
  double window_start = 0.0;
  double max_e_p = 0.0, rms_e_p = 0.0;
  double max_e_eps = 0.0, rms_e_eps = 0.0;
  double max_e_v = 0.0, rms_e_v = 0.0;
  double final_abs_e_eta = 0.0;
};

// Statistics over rows with t >= 0.8 t_last.
TerminalStats terminal_stats(const std::vector<TraceRow>& rows);

struct MonitorOptions {
  double step_tolerance_factor = 1e-6;  // allowed increase per step, times V(0)
  double rate_tolerance = 1e-3;         // relative V rate mismatch
  // Rate samples with |analytic rate| below this fraction of its maximum are
  // skipped as vanishingly small.
  double rate_floor = 1e-6;
};

struct LyapunovReport {
  int steps = 0;
  int violations = 0;
  double max_increase = 0.0;
  double tolerance = 0.0;
  int rate_samples = 0;
  double max_rate_error = 0.0;         // against the e_eta squared rate
  double max_rate_error_linear = 0.0;  // against the first-power rate
  bool descent_ok() const { return violations == 0; }
  bool rate_ok(double tol) const { return rate_samples > 0 && max_rate_error <= tol; }
};

LyapunovReport lyapunov_monitor(const SimTrace& trace, const MonitorOptions& options = {});

// Position (m) and orientation (rad) disagreement between the object pose
// implied by each agent's kinematics and the integrated object pose,
// maximized over agents.
struct Drift {
  double position = 0.0;
  double orientation = 0.0;
  double combined() const { return std::max(position, orientation); }
};
Drift rigidity_drift(const SimConfig& config, const SimState& state);

}  // namespace coop::sim
