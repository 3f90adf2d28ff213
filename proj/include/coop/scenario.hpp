#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coop/sim.hpp"

namespace coop::cli {

using model::VectorXd;

inline constexpr int kSchemaVersion = 1;

// Raw scenario values, kept exactly as written so that parse -> serialize ->
// parse is the identity. Models are built from them on demand.

struct PoseSpec {
  Vector3d position = Vector3d::Zero();
  Vector4d orientation = Vector4d(1, 0, 0, 0);  // (eta, eps), unit within 1e-6
};

// Inertia about the center of mass, ordered (xx, yy, zz, xy, xz, yz).
struct InertialSpec {
  double mass = 1.0;
  Vector3d com = Vector3d::Zero();
  Vector6d inertia_com = Vector6d::Zero();
};

struct JointSpec {
  PoseSpec origin;
  Vector3d axis = Vector3d::UnitZ();
  InertialSpec link;
};

struct AgentSpec {
  std::string kind = "task_space_body";  // or "serial_chain"
  InertialSpec body;                     // task_space_body
  PoseSpec base;                         // serial_chain
  std::vector<JointSpec> joints;
  PoseSpec tool;
  VectorXd initial_q;  // IK seed for a serial chain; may be empty
  PoseSpec grasp;      // end-effector frame in the object frame
};

struct ObjectSpec {
  double mass = 1.0;
  Vector6d inertia_com = Vector6d::Zero();
  Vector3d gravity = model::kDefaultGravity;
};

struct TrajectorySpec {
  std::string family = "constant";  // constant | sinusoid | table
  // constant
  PoseSpec pose;
  // sinusoid
  Vector3d center = Vector3d::Zero();
  Vector3d amplitude = Vector3d::Zero();
  Vector3d period = Vector3d::Ones();
  Vector3d phase = Vector3d::Zero();
  Vector4d base = Vector4d(1, 0, 0, 0);
  Vector3d axis = Vector3d::UnitZ();
  double angle_offset = 0.0;
  double angle_amplitude = 0.0;
  double angle_period = 1.0;
  double angle_phase = 0.0;
  // table
  std::vector<double> times;
  std::vector<PoseSpec> samples;
};

struct ControllerSpec {
  std::string mode = "nonadaptive";  // or "adaptive"
  double k_p = 1.0;
  double k_eps = 1.0;
  std::vector<double> k_v;
  std::vector<double> load_sharing;
  std::vector<double> gamma;
  std::string orientation_reference = "standard";  // or "flipped"
  double estimate_scale = 0.5;
  double object_mass_scale = 1.0;  // controller's object mass / true mass
  std::vector<double> internal_force;  // 6 per agent, object frame; empty for none
  bool zero_order_hold = false;
};

struct InitialSpec {
  Vector3d position = Vector3d::Zero();
  Vector4d orientation = Vector4d(1, 0, 0, 0);
  Vector6d twist = Vector6d::Zero();
  // Uniform random perturbation drawn from `seed`: position in a cube of
  // half-width `position_noise`, rotation angle up to `angle_noise`.
  double position_noise = 0.0;
  double angle_noise = 0.0;
};

struct SimulationSpec {
  double duration = 1.0;
  double dt = 1e-3;
  int log_every = 1;
  double velocity_bound = 1e3;
  double rigidity_tolerance = 1e-6;
  double convergence_tolerance = 1e-3;
  std::uint64_t seed = 0;
};

struct OutputSpec {
  std::string trace = "trace.csv";
  std::string report = "report.txt";
  std::string summary = "summary.json";
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  ObjectSpec object;
  std::vector<AgentSpec> agents;
  TrajectorySpec trajectory;
  ControllerSpec controller;
  InitialSpec initial;
  SimulationSpec simulation;
  OutputSpec output;

  bool operator==(const Scenario& other) const;
};

// Throws ScenarioError (field path + message) on malformed input or a
// violated invariant. Missing optional entries take the defaults above.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

// All invariants, including e_eta(0) != 0 (|e_eta(0)| < 1e-9 is rejected).
void validate_scenario(const Scenario& scenario);

std::vector<std::string> bundled_scenario_names();
// Throws ScenarioError for an unknown name.
Scenario bundled_scenario(const std::string& name);
// A bundled name or a file path.
Scenario load_scenario(const std::string& name_or_path);

// Simulation inputs built from a validated scenario.
struct BuiltScenario {
  sim::SimConfig config;
  sim::SimState initial;
};
BuiltScenario build_scenario(const Scenario& scenario);

model::AgentModel build_agent(const AgentSpec& spec, const Vector3d& gravity);
model::ObjectModel build_object(const ObjectSpec& spec);
std::shared_ptr<const control::Trajectory> build_trajectory(const TrajectorySpec& spec);

}  // namespace coop::cli
