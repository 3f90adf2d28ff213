#include "coop/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "coop/errors.hpp"

namespace coop::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ScenarioError(path, msg); }

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  check_object(j, path);
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], index_path(path, i)));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> fixed(const json& v, const std::string& path) {
  const std::vector<double> xs = numbers(v, path);
  if (static_cast<int>(xs.size()) != N) fail(path, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = xs[i];
  return out;
}

// Optional-field readers: leave `out` untouched when the key is absent.
void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (obj.contains(key)) out = number(obj.at(key), join(path, key));
}

void read(const json& obj, const std::string& path, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  out = v.get<int>();
}

void read(const json& obj, const std::string& path, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(join(path, key), "expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void read(const json& obj, const std::string& path, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
  out = obj.at(key).get<bool>();
}

void read(const json& obj, const std::string& path, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_string()) fail(join(path, key), "expected a string");
  out = obj.at(key).get<std::string>();
}

void read(const json& obj, const std::string& path, const char* key, std::vector<double>& out) {
  if (obj.contains(key)) out = numbers(obj.at(key), join(path, key));
}

template <int N>
void read(const json& obj, const std::string& path, const char* key, Eigen::Matrix<double, N, 1>& out) {
  if (obj.contains(key)) out = fixed<N>(obj.at(key), join(path, key));
}

template <int N>
json to_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v[i]);
  return a;
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

PoseSpec parse_pose(const json& j, const std::string& path) {
  check_keys(j, path, {"position", "orientation"});
  PoseSpec p;
  read(j, path, "position", p.position);
  read(j, path, "orientation", p.orientation);
  return p;
}

json pose_json(const PoseSpec& p) { return {{"position", to_json(p.position)}, {"orientation", to_json(p.orientation)}}; }

InertialSpec parse_inertial(const json& j, const std::string& path, const std::set<std::string>& extra) {
  std::set<std::string> keys{"mass", "com", "inertia_com"};
  keys.insert(extra.begin(), extra.end());
  check_keys(j, path, keys);
  InertialSpec s;
  if (!j.contains("mass")) fail(join(path, "mass"), "required");
  read(j, path, "mass", s.mass);
  read(j, path, "com", s.com);
  if (!j.contains("inertia_com")) fail(join(path, "inertia_com"), "required");
  read(j, path, "inertia_com", s.inertia_com);
  return s;
}

void put_inertial(json& j, const InertialSpec& s) {
  j["mass"] = s.mass;
  j["com"] = to_json(s.com);
  j["inertia_com"] = to_json(s.inertia_com);
}

AgentSpec parse_agent(const json& j, const std::string& path) {
  check_object(j, path);
  AgentSpec a;
  read(j, path, "kind", a.kind);
  if (a.kind == "task_space_body") {
    a.body = parse_inertial(j, path, {"kind", "grasp"});
  } else if (a.kind == "serial_chain") {
    check_keys(j, path, {"kind", "base", "joints", "tool", "initial_q", "grasp"});
    if (j.contains("base")) a.base = parse_pose(j.at("base"), join(path, "base"));
    if (j.contains("tool")) a.tool = parse_pose(j.at("tool"), join(path, "tool"));
    const std::string jp = join(path, "joints");
    if (!j.contains("joints") || !j.at("joints").is_array()) fail(jp, "expected an array of joints");
    for (std::size_t i = 0; i < j.at("joints").size(); ++i) {
      const json& jj = j.at("joints")[i];
      const std::string p = index_path(jp, i);
      JointSpec js;
      js.link = parse_inertial(jj, p, {"origin", "axis"});
      if (jj.contains("origin")) js.origin = parse_pose(jj.at("origin"), join(p, "origin"));
      read(jj, p, "axis", js.axis);
      a.joints.push_back(js);
    }
    if (j.contains("initial_q")) {
      const std::vector<double> q = numbers(j.at("initial_q"), join(path, "initial_q"));
      a.initial_q = Eigen::Map<const VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    }
  } else {
    fail(join(path, "kind"), "must be task_space_body or serial_chain");
  }
  if (!j.contains("grasp")) fail(join(path, "grasp"), "required");
  a.grasp = parse_pose(j.at("grasp"), join(path, "grasp"));
  return a;
}

json agent_json(const AgentSpec& a) {
  json j;
  j["kind"] = a.kind;
  if (a.kind == "task_space_body") {
    put_inertial(j, a.body);
  } else {
    j["base"] = pose_json(a.base);
    json joints = json::array();
    for (const JointSpec& js : a.joints) {
      json jj;
      jj["origin"] = pose_json(js.origin);
      jj["axis"] = to_json(js.axis);
      put_inertial(jj, js.link);
      joints.push_back(jj);
    }
    j["joints"] = joints;
    j["tool"] = pose_json(a.tool);
    if (a.initial_q.size() > 0) j["initial_q"] = to_json(a.initial_q);
  }
  j["grasp"] = pose_json(a.grasp);
  return j;
}

TrajectorySpec parse_trajectory(const json& j, const std::string& path) {
  check_object(j, path);
  TrajectorySpec t;
  read(j, path, "family", t.family);
  if (t.family == "constant") {
    check_keys(j, path, {"family", "position", "orientation"});
    read(j, path, "position", t.pose.position);
    read(j, path, "orientation", t.pose.orientation);
  } else if (t.family == "sinusoid") {
    check_keys(j, path, {"family", "center", "amplitude", "period", "phase", "base", "axis", "angle_offset",
                         "angle_amplitude", "angle_period", "angle_phase"});
    read(j, path, "center", t.center);
    read(j, path, "amplitude", t.amplitude);
    read(j, path, "period", t.period);
    read(j, path, "phase", t.phase);
    read(j, path, "base", t.base);
    read(j, path, "axis", t.axis);
    read(j, path, "angle_offset", t.angle_offset);
    read(j, path, "angle_amplitude", t.angle_amplitude);
    read(j, path, "angle_period", t.angle_period);
    read(j, path, "angle_phase", t.angle_phase);
  } else if (t.family == "table") {
    check_keys(j, path, {"family", "times", "samples"});
    read(j, path, "times", t.times);
    const std::string sp = join(path, "samples");
    if (!j.contains("samples") || !j.at("samples").is_array()) fail(sp, "expected an array of poses");
    for (std::size_t i = 0; i < j.at("samples").size(); ++i) {
      t.samples.push_back(parse_pose(j.at("samples")[i], index_path(sp, i)));
    }
  } else {
    fail(join(path, "family"), "must be constant, sinusoid or table");
  }
  return t;
}

json trajectory_json(const TrajectorySpec& t) {
  json j;
  j["family"] = t.family;
  if (t.family == "constant") {
    j["position"] = to_json(t.pose.position);
    j["orientation"] = to_json(t.pose.orientation);
  } else if (t.family == "sinusoid") {
    j["center"] = to_json(t.center);
    j["amplitude"] = to_json(t.amplitude);
    j["period"] = to_json(t.period);
    j["phase"] = to_json(t.phase);
    j["base"] = to_json(t.base);
    j["axis"] = to_json(t.axis);
    j["angle_offset"] = t.angle_offset;
    j["angle_amplitude"] = t.angle_amplitude;
    j["angle_period"] = t.angle_period;
    j["angle_phase"] = t.angle_phase;
  } else {
    j["times"] = t.times;
    json samples = json::array();
    for (const PoseSpec& p : t.samples) samples.push_back(pose_json(p));
    j["samples"] = samples;
  }
  return j;
}

void check_quaternion(const Vector4d& q, const std::string& path) {
  if (std::abs(q.norm() - 1.0) > 1e-6) fail(path, "quaternion must have unit norm (within 1e-6)");
}

void check_pose(const PoseSpec& p, const std::string& path) { check_quaternion(p.orientation, join(path, "orientation")); }

model::Pose to_pose(const PoseSpec& p) { return {p.position, spatial::UnitQuaternion(p.orientation)}; }

model::InertialParams to_inertial(const InertialSpec& s) {
  return model::InertialParams::from_com(s.mass, s.com, model::inertia_from_sym(s.inertia_com));
}

void check_inertial(const InertialSpec& s, const std::string& path) {
  if (!(s.mass > 0.0)) fail(join(path, "mass"), "must be positive");
  try {
    to_inertial(s).validate(path);
  } catch (const std::invalid_argument& e) {
    fail(join(path, "inertia_com"), e.what());
  }
}

model::ObjectState nominal_initial_state(const InitialSpec& s) {
  model::ObjectState o;
  o.position = s.position;
  o.orientation = spatial::UnitQuaternion(s.orientation);
  o.twist = spatial::Twist::from_vector(s.twist);
  return o;
}

void check_initial_eta(const spatial::UnitQuaternion& desired, const spatial::UnitQuaternion& actual,
                       const std::string& path) {
  const double e_eta = (desired * actual.conjugate()).eta();
  if (std::abs(e_eta) < 1e-9) {
    fail(path, "initial orientation error has e_eta = 0 (a half-turn from the desired attitude); the controller "
               "cannot leave this unstable equilibrium");
  }
}

}  // namespace

bool Scenario::operator==(const Scenario& other) const {
  return serialize_scenario(*this) == serialize_scenario(other);
}

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("", std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"schema_version", "name", "description", "object", "agents", "trajectory", "controller",
                        "initial", "simulation", "output"});
  Scenario s;
  if (!root.contains("schema_version")) fail("schema_version", "required");
  read(root, "", "schema_version", s.schema_version);
  if (s.schema_version != kSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(s.schema_version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");
  }
  read(root, "", "name", s.name);
  read(root, "", "description", s.description);

  if (!root.contains("object")) fail("object", "required");
  {
    const json& o = root.at("object");
    check_keys(o, "object", {"mass", "inertia_com", "gravity"});
    if (!o.contains("mass")) fail("object.mass", "required");
    read(o, "object", "mass", s.object.mass);
    if (!o.contains("inertia_com")) fail("object.inertia_com", "required");
    read(o, "object", "inertia_com", s.object.inertia_com);
    read(o, "object", "gravity", s.object.gravity);
  }

  if (!root.contains("agents") || !root.at("agents").is_array()) fail("agents", "expected an array of agents");
  for (std::size_t i = 0; i < root.at("agents").size(); ++i) {
    s.agents.push_back(parse_agent(root.at("agents")[i], index_path("agents", i)));
  }

  if (!root.contains("trajectory")) fail("trajectory", "required");
  s.trajectory = parse_trajectory(root.at("trajectory"), "trajectory");

  if (!root.contains("controller")) fail("controller", "required");
  {
    const json& c = root.at("controller");
    const std::string p = "controller";
    check_keys(c, p, {"mode", "k_p", "k_eps", "k_v", "load_sharing", "gamma", "orientation_reference",
                      "estimate_scale", "object_mass_scale", "internal_force", "zero_order_hold"});
    ControllerSpec& cs = s.controller;
    read(c, p, "mode", cs.mode);
    read(c, p, "k_p", cs.k_p);
    read(c, p, "k_eps", cs.k_eps);
    read(c, p, "k_v", cs.k_v);
    read(c, p, "load_sharing", cs.load_sharing);
    read(c, p, "gamma", cs.gamma);
    read(c, p, "orientation_reference", cs.orientation_reference);
    read(c, p, "estimate_scale", cs.estimate_scale);
    read(c, p, "object_mass_scale", cs.object_mass_scale);
    read(c, p, "internal_force", cs.internal_force);
    read(c, p, "zero_order_hold", cs.zero_order_hold);
  }

  if (root.contains("initial")) {
    const json& in = root.at("initial");
    check_keys(in, "initial", {"position", "orientation", "twist", "position_noise", "angle_noise"});
    read(in, "initial", "position", s.initial.position);
    read(in, "initial", "orientation", s.initial.orientation);
    read(in, "initial", "twist", s.initial.twist);
    read(in, "initial", "position_noise", s.initial.position_noise);
    read(in, "initial", "angle_noise", s.initial.angle_noise);
  }
  if (root.contains("simulation")) {
    const json& sm = root.at("simulation");
    const std::string p = "simulation";
    check_keys(sm, p, {"duration", "dt", "log_every", "velocity_bound", "rigidity_tolerance", "convergence_tolerance",
                       "seed"});
    read(sm, p, "duration", s.simulation.duration);
    read(sm, p, "dt", s.simulation.dt);
    read(sm, p, "log_every", s.simulation.log_every);
    read(sm, p, "velocity_bound", s.simulation.velocity_bound);
    read(sm, p, "rigidity_tolerance", s.simulation.rigidity_tolerance);
    read(sm, p, "convergence_tolerance", s.simulation.convergence_tolerance);
    read(sm, p, "seed", s.simulation.seed);
  }
  if (root.contains("output")) {
    const json& out = root.at("output");
    check_keys(out, "output", {"trace", "report", "summary"});
    read(out, "output", "trace", s.output.trace);
    read(out, "output", "report", s.output.report);
    read(out, "output", "summary", s.output.summary);
  }
  validate_scenario(s);
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["schema_version"] = s.schema_version;
  root["name"] = s.name;
  root["description"] = s.description;
  root["object"] = {{"mass", s.object.mass},
                    {"inertia_com", to_json(s.object.inertia_com)},
                    {"gravity", to_json(s.object.gravity)}};
  json agents = json::array();
  for (const AgentSpec& a : s.agents) agents.push_back(agent_json(a));
  root["agents"] = agents;
  root["trajectory"] = trajectory_json(s.trajectory);
  const ControllerSpec& c = s.controller;
  root["controller"] = {{"mode", c.mode},
                        {"k_p", c.k_p},
                        {"k_eps", c.k_eps},
                        {"k_v", c.k_v},
                        {"load_sharing", c.load_sharing},
                        {"gamma", c.gamma},
                        {"orientation_reference", c.orientation_reference},
                        {"estimate_scale", c.estimate_scale},
                        {"object_mass_scale", c.object_mass_scale},
                        {"internal_force", c.internal_force},
                        {"zero_order_hold", c.zero_order_hold}};
  root["initial"] = {{"position", to_json(s.initial.position)},
                     {"orientation", to_json(s.initial.orientation)},
                     {"twist", to_json(s.initial.twist)},
                     {"position_noise", s.initial.position_noise},
                     {"angle_noise", s.initial.angle_noise}};
  root["simulation"] = {{"duration", s.simulation.duration},
                        {"dt", s.simulation.dt},
                        {"log_every", s.simulation.log_every},
                        {"velocity_bound", s.simulation.velocity_bound},
                        {"rigidity_tolerance", s.simulation.rigidity_tolerance},
                        {"convergence_tolerance", s.simulation.convergence_tolerance},
                        {"seed", s.simulation.seed}};
  root["output"] = {{"trace", s.output.trace}, {"report", s.output.report}, {"summary", s.output.summary}};
  return root.dump(2) + "\n";
}

void validate_scenario(const Scenario& s) {
  if (s.schema_version != kSchemaVersion) fail("schema_version", "unsupported version");
  if (!(s.object.mass > 0.0)) fail("object.mass", "must be positive");
  check_inertial({s.object.mass, Vector3d::Zero(), s.object.inertia_com}, "object");

  const std::size_t n = s.agents.size();
  if (n == 0) fail("agents", "at least one agent is required");
  for (std::size_t i = 0; i < n; ++i) {
    const AgentSpec& a = s.agents[i];
    const std::string p = index_path("agents", i);
    check_pose(a.grasp, join(p, "grasp"));
    if (a.kind == "task_space_body") {
      check_inertial(a.body, p);
    } else if (a.kind == "serial_chain") {
      if (a.joints.size() != static_cast<std::size_t>(model::AgentModel::kChainJoints)) {
        fail(join(p, "joints"), "a serial chain needs exactly 6 joints");
      }
      check_pose(a.base, join(p, "base"));
      check_pose(a.tool, join(p, "tool"));
      for (std::size_t k = 0; k < a.joints.size(); ++k) {
        const std::string jp = index_path(join(p, "joints"), k);
        check_pose(a.joints[k].origin, join(jp, "origin"));
        if (a.joints[k].axis.norm() < 1e-12) fail(join(jp, "axis"), "must be nonzero");
        check_inertial(a.joints[k].link, jp);
      }
      if (a.initial_q.size() != 0 && a.initial_q.size() != model::AgentModel::kChainJoints) {
        fail(join(p, "initial_q"), "needs 6 joint values");
      }
    } else {
      fail(join(p, "kind"), "must be task_space_body or serial_chain");
    }
  }

  const TrajectorySpec& t = s.trajectory;
  if (t.family == "constant") {
    check_pose(t.pose, "trajectory");
  } else if (t.family == "sinusoid") {
    if ((t.period.array() <= 0.0).any()) fail("trajectory.period", "periods must be positive");
    if (!(t.angle_period > 0.0)) fail("trajectory.angle_period", "must be positive");
    if (t.axis.norm() < 1e-12) fail("trajectory.axis", "must be nonzero");
    check_quaternion(t.base, "trajectory.base");
  } else if (t.family == "table") {
    if (t.times.size() < 2) fail("trajectory.times", "need at least two samples");
    if (t.samples.size() != t.times.size()) fail("trajectory.samples", "need one pose per time");
    for (std::size_t i = 1; i < t.times.size(); ++i) {
      if (!(t.times[i] > t.times[i - 1])) fail("trajectory.times", "must increase strictly");
    }
    for (std::size_t i = 0; i < t.samples.size(); ++i) check_pose(t.samples[i], index_path("trajectory.samples", i));
  } else {
    fail("trajectory.family", "must be constant, sinusoid or table");
  }

  const ControllerSpec& c = s.controller;
  if (c.mode != "nonadaptive" && c.mode != "adaptive") fail("controller.mode", "must be nonadaptive or adaptive");
  if (c.orientation_reference != "standard" && c.orientation_reference != "flipped") {
    fail("controller.orientation_reference", "must be standard or flipped");
  }
  if (!(c.k_p > 0.0)) fail("controller.k_p", "must be positive");
  if (!(c.k_eps > 0.0)) fail("controller.k_eps", "must be positive");
  if (c.k_v.size() != n) fail("controller.k_v", "needs one entry per agent");
  for (double k : c.k_v) {
    if (!(k > 0.0)) fail("controller.k_v", "entries must be positive");
  }
  if (c.load_sharing.size() != n) fail("controller.load_sharing", "needs one entry per agent");
  double sum = 0.0;
  for (double ci : c.load_sharing) {
    if (!(ci >= 0.0 && ci <= 1.0)) fail("controller.load_sharing", "entries must lie in [0, 1]");
    sum += ci;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "load-sharing sum must equal 1 within 1e-12 (got " << sum << ")";
    fail("controller.load_sharing", msg.str());
  }
  if (c.mode == "adaptive") {
    if (c.gamma.size() != n) fail("controller.gamma", "needs one entry per agent in adaptive mode");
    for (double g : c.gamma) {
      if (!(g > 0.0)) fail("controller.gamma", "entries must be positive");
    }
  }
  if (!(c.object_mass_scale > 0.0)) fail("controller.object_mass_scale", "must be positive");
  if (!c.internal_force.empty() && c.internal_force.size() != 6 * n) {
    fail("controller.internal_force", "needs 6 entries per agent");
  }

  check_quaternion(s.initial.orientation, "initial.orientation");
  if (s.initial.position_noise < 0.0) fail("initial.position_noise", "must be non-negative");
  if (s.initial.angle_noise < 0.0) fail("initial.angle_noise", "must be non-negative");

  const SimulationSpec& sm = s.simulation;
  if (!(sm.duration > 0.0)) fail("simulation.duration", "must be positive");
  if (!(sm.dt > 0.0)) fail("simulation.dt", "must be positive");
  if (sm.dt > sm.duration) fail("simulation.dt", "must not exceed the duration");
  if (sm.log_every < 1) fail("simulation.log_every", "must be at least 1");
  if (!(sm.velocity_bound > 0.0)) fail("simulation.velocity_bound", "must be positive");
  if (!(sm.rigidity_tolerance > 0.0)) fail("simulation.rigidity_tolerance", "must be positive");
  if (!(sm.convergence_tolerance > 0.0)) fail("simulation.convergence_tolerance", "must be positive");

  const control::TrajectoryPoint start = build_trajectory(t)->at(0.0);
  check_initial_eta(start.xi, spatial::UnitQuaternion(s.initial.orientation), "initial.orientation");
}

model::AgentModel build_agent(const AgentSpec& spec, const Vector3d& gravity) {
  if (spec.kind == "task_space_body") {
    return model::AgentModel::task_space_body({to_inertial(spec.body)}, gravity);
  }
  model::SerialChain chain;
  chain.base = to_pose(spec.base);
  chain.tool = to_pose(spec.tool);
  for (const JointSpec& js : spec.joints) {
    model::RevoluteJoint joint;
    joint.origin = to_pose(js.origin);
    joint.axis = js.axis.normalized();
    joint.link = to_inertial(js.link);
    chain.joints.push_back(joint);
  }
  return model::AgentModel::serial_chain(chain, gravity);
}

model::ObjectModel build_object(const ObjectSpec& spec) {
  model::ObjectModel o;
  o.mass = spec.mass;
  o.inertia_sym = spec.inertia_com;
  o.gravity = spec.gravity;
  return o;
}

std::shared_ptr<const control::Trajectory> build_trajectory(const TrajectorySpec& t) {
  if (t.family == "constant") {
    return std::make_shared<control::ConstantTrajectory>(t.pose.position, spatial::UnitQuaternion(t.pose.orientation));
  }
  if (t.family == "sinusoid") {
    control::SinusoidParams p;
    p.center = t.center;
    p.amplitude = t.amplitude;
    p.period = t.period;
    p.phase = t.phase;
    p.base = spatial::UnitQuaternion(t.base);
    p.axis = t.axis;
    p.angle_offset = t.angle_offset;
    p.angle_amplitude = t.angle_amplitude;
    p.angle_period = t.angle_period;
    p.angle_phase = t.angle_phase;
    return std::make_shared<control::SinusoidTrajectory>(p);
  }
  if (t.family == "table") {
    std::vector<Vector3d> positions;
    std::vector<spatial::UnitQuaternion> orientations;
    for (const PoseSpec& ps : t.samples) {
      positions.push_back(ps.position);
      orientations.emplace_back(ps.orientation);
    }
    return std::make_shared<control::TableTrajectory>(t.times, positions, orientations);
  }
  throw ScenarioError("trajectory.family", "must be constant, sinusoid or table");
}

BuiltScenario build_scenario(const Scenario& s) {
  validate_scenario(s);
  BuiltScenario b;
  sim::SimConfig& cfg = b.config;
  cfg.object = build_object(s.object);
  std::vector<VectorXd> seeds;
  for (const AgentSpec& a : s.agents) {
    cfg.agents.push_back(build_agent(a, s.object.gravity));
    cfg.grasp.offsets.push_back({a.grasp.position, spatial::UnitQuaternion(a.grasp.orientation)});
    seeds.push_back(a.initial_q.size() ? a.initial_q : VectorXd::Zero(cfg.agents.back().configuration_dim()));
  }
  cfg.trajectory = build_trajectory(s.trajectory);
  const ControllerSpec& c = s.controller;
  cfg.gains.k_p = c.k_p;
  cfg.gains.k_eps = c.k_eps;
  cfg.gains.k_v = c.k_v;
  cfg.gains.load_sharing = c.load_sharing;
  cfg.gains.gamma = c.gamma;
  cfg.gains.orientation_reference = c.orientation_reference == "flipped" ? control::OrientationReference::kFlipped
                                                                         : control::OrientationReference::kStandard;
  cfg.mode = c.mode == "adaptive" ? control::ControllerMode::kAdaptive : control::ControllerMode::kNonAdaptive;
  if (c.object_mass_scale != 1.0) {
    model::ObjectModel wrong = cfg.object;
    wrong.mass *= c.object_mass_scale;
    cfg.controller_object = wrong;
  }
  cfg.estimate_scale = c.estimate_scale;
  if (!c.internal_force.empty()) {
    cfg.internal_force = Eigen::Map<const VectorXd>(c.internal_force.data(), static_cast<Eigen::Index>(c.internal_force.size()));
  }
  cfg.zero_order_hold = c.zero_order_hold;
  cfg.duration = s.simulation.duration;
  cfg.dt = s.simulation.dt;
  cfg.log_every = s.simulation.log_every;
  cfg.velocity_bound = s.simulation.velocity_bound;
  cfg.rigidity_tolerance = s.simulation.rigidity_tolerance;
  cfg.convergence_tolerance = s.simulation.convergence_tolerance;

  model::ObjectState start = nominal_initial_state(s.initial);
  if (s.initial.position_noise > 0.0 || s.initial.angle_noise > 0.0) {
    std::mt19937_64 rng(s.simulation.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector3d dp(unit(rng), unit(rng), unit(rng));
    Vector3d axis(unit(rng), unit(rng), unit(rng));
    const double angle = s.initial.angle_noise * 0.5 * (unit(rng) + 1.0);
    start.position += s.initial.position_noise * dp;
    if (axis.norm() > 1e-12 && angle > 0.0) {
      start.orientation = spatial::UnitQuaternion::from_axis_angle(axis, angle) * start.orientation;
    }
    check_initial_eta(cfg.trajectory->at(0.0).xi, start.orientation, "initial.angle_noise");
  }
  b.initial = sim::initial_state(cfg, start, seeds);
  return b;
}

std::vector<std::string> bundled_scenario_names() { return {"paper_sec5"}; }

Scenario bundled_scenario(const std::string& name) {
  if (name != "paper_sec5") throw ScenarioError("", "unknown bundled scenario '" + name + "'");
  constexpr double kPi = std::numbers::pi;
  Scenario s;
  s.name = "paper_sec5";
  s.description =
      "Two agents carry a 0.3 kg bar along a 15 s sinusoid in x with a +-6 deg yaw oscillation. The arms' "
      "inertial data are not published; each agent is a task-space rigid body of 0.8 kg with an offset "
      "center of mass, a documented substitution.";
  s.object.mass = 0.3;
  // Solid box 0.2 x 0.05 x 0.05 m about its center.
  const double ixx = 0.3 / 12.0 * (0.05 * 0.05 + 0.05 * 0.05);
  const double iyy = 0.3 / 12.0 * (0.2 * 0.2 + 0.05 * 0.05);
  s.object.inertia_com << ixx, iyy, iyy, 0.0, 0.0, 0.0;
  s.object.gravity = Vector3d(0.0, 0.0, -9.81);

  AgentSpec a;
  a.kind = "task_space_body";
  a.body.mass = 0.8;
  a.body.com = Vector3d(0.02, 0.0, 0.01);
  a.body.inertia_com << 0.004, 0.006, 0.005, 0.0, 0.0, 0.0;
  a.grasp.position = Vector3d(-0.1, 0.0, 0.0);
  s.agents.push_back(a);
  a.grasp.position = Vector3d(0.1, 0.0, 0.0);
  a.grasp.orientation = Vector4d(0.0, 0.0, 0.0, 1.0);  // half-turn about z: faces agent 1
  s.agents.push_back(a);

  TrajectorySpec& t = s.trajectory;
  t.family = "sinusoid";
  t.center = Vector3d(0.3, 0.12, 0.0);
  t.amplitude = Vector3d(0.05, 0.0, 0.0);
  t.period = Vector3d(15.0, 15.0, 15.0);
  t.axis = Vector3d::UnitZ();
  t.angle_amplitude = -kPi / 30.0;
  t.angle_period = 15.0;

  ControllerSpec& c = s.controller;
  c.mode = "nonadaptive";
  c.k_p = 150.0;
  c.k_eps = 100.0;
  c.k_v = {2.5, 2.5};
  c.load_sharing = {0.5, 0.5};
  c.gamma = {1.0, 1.0};
  c.estimate_scale = 0.5;

  s.initial.position = Vector3d(0.301, 0.123, 0.0);
  s.simulation.duration = 100.0;
  s.simulation.dt = 1e-3;
  s.simulation.log_every = 10;
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  for (const std::string& n : bundled_scenario_names()) {
    if (n == name_or_path) return bundled_scenario(n);
  }
  return parse_scenario_file(name_or_path);
}

}  // namespace coop::cli
