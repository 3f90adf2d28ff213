#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "coop/cli.hpp"
#include "coop/errors.hpp"
#include "coop/scenario.hpp"
#include "json.hpp"

#ifndef COOP_SOURCE_DIR
#error "COOP_SOURCE_DIR must point at the repository root"
#endif

namespace coop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("coop_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json bundled_json() { return json::parse(serialize_scenario(bundled_scenario("paper_sec5"))); }

std::string field_of_error(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ScenarioError& e) {
    return e.field() + " | " + e.what();
  }
  return "";
}

TEST(BundledScenario, EncodesTheReferenceRun) {
  const Scenario s = bundled_scenario("paper_sec5");
  EXPECT_EQ(s.controller.k_p, 150.0);
  EXPECT_EQ(s.controller.k_eps, 100.0);
  EXPECT_EQ(s.controller.k_v, (std::vector<double>{2.5, 2.5}));
  EXPECT_EQ(s.controller.load_sharing, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(s.simulation.duration, 100.0);
  EXPECT_EQ(s.simulation.dt, 1e-3);
  EXPECT_EQ(s.initial.position, Vector3d(0.301, 0.123, 0.0));
  EXPECT_EQ(s.agents.size(), 2u);

  const auto traj = build_trajectory(s.trajectory);
  for (double t : {0.0, 1.3, 3.75, 7.1, 11.25, 14.9, 42.0}) {
    const double phase = std::sin(2 * std::numbers::pi * t / 15.0);
    const control::TrajectoryPoint pt = traj->at(t);
    EXPECT_LT((pt.p - Vector3d(0.3 + 0.05 * phase, 0.12, 0.0)).norm(), 1e-15);
    const double half = std::numbers::pi / 60.0 * phase;
    const Vector4d expected(std::cos(half), 0.0, 0.0, -std::sin(half));
    EXPECT_LT((pt.xi.coeffs() - expected).norm(), 1e-15);
  }
  const BuiltScenario b = build_scenario(s);
  EXPECT_EQ(b.initial.object.position, Vector3d(0.301, 0.123, 0.0));
  EXPECT_EQ(b.initial.object.orientation.coeffs(), Vector4d(1, 0, 0, 0));
}

TEST(BundledScenario, FileInRepositoryMatches) {
  const Scenario file = parse_scenario_file(std::string(COOP_SOURCE_DIR) + "/scenarios/paper_sec5.json");
  EXPECT_TRUE(file == bundled_scenario("paper_sec5"));
  EXPECT_TRUE(load_scenario("paper_sec5") == file);
  EXPECT_THROW(bundled_scenario("nope"), ScenarioError);
}

TEST(ExampleScenario, SerialChainsParseAndRun) {
  Scenario s = parse_scenario_file(std::string(COOP_SOURCE_DIR) + "/scenarios/two_arms.json");
  EXPECT_TRUE(parse_scenario_text(serialize_scenario(s)) == s);
  ASSERT_EQ(s.agents.size(), 2u);
  EXPECT_EQ(s.agents[1].kind, "serial_chain");
  EXPECT_EQ(s.agents[1].joints.size(), 6u);
  s.simulation.duration = 0.2;
  const BuiltScenario b = build_scenario(s);
  EXPECT_LT(sim::rigidity_drift(b.config, b.initial).combined(), 1e-9);
  const sim::SimTrace trace = sim::run_scenario(b.config, b.initial);
  EXPECT_TRUE(trace.status == sim::Status::kConverged || trace.status == sim::Status::kNotConverged)
      << trace.message;
  EXPECT_EQ(sim::lyapunov_monitor(trace).violations, 0);
  EXPECT_EQ(trace.near_singular_steps, 0);
}

TEST(ScenarioFormat, RoundTripIsIdentity) {
  Scenario s = bundled_scenario("paper_sec5");
  s.controller.mode = "adaptive";
  s.controller.gamma = {0.25, 3.0};
  s.controller.internal_force = std::vector<double>(12, 0.1);
  s.initial.position_noise = 1e-3;
  s.simulation.seed = 42;
  s.description = "round trip";
  s.agents[0].body.com = Vector3d(0.1 / 3.0, std::nextafter(0.2, 1.0), -1e-300);
  const std::string once = serialize_scenario(s);
  const Scenario back = parse_scenario_text(once);
  EXPECT_TRUE(back == s);
  EXPECT_EQ(back.agents[0].body.com, s.agents[0].body.com);
  EXPECT_EQ(serialize_scenario(back), once);
}

TEST(ScenarioFormat, TableTrajectoryRoundTrips) {
  Scenario s = bundled_scenario("paper_sec5");
  s.trajectory = {};
  s.trajectory.family = "table";
  for (int k = 0; k < 5; ++k) {
    s.trajectory.times.push_back(0.5 * k);
    PoseSpec p;
    p.position = Vector3d(0.3 + 0.01 * k, 0.12, 0.0);
    s.trajectory.samples.push_back(p);
  }
  const Scenario back = parse_scenario_text(serialize_scenario(s));
  EXPECT_TRUE(back == s);
  EXPECT_NO_THROW(build_scenario(back));
}

TEST(ScenarioFormat, RejectsLoadSharingThatDoesNotSumToOne) {
  json j = bundled_json();
  j["controller"]["load_sharing"] = {0.6, 0.6};
  const std::string err = field_of_error(j.dump());
  EXPECT_NE(err.find("controller.load_sharing"), std::string::npos) << err;
  EXPECT_NE(err.find("load-sharing sum"), std::string::npos) << err;
}

TEST(ScenarioFormat, MissingTimeStepTakesTheDefault) {
  json j = bundled_json();
  j["simulation"].erase("dt");
  EXPECT_EQ(parse_scenario_text(j.dump()).simulation.dt, 1e-3);
}

TEST(ScenarioFormat, RejectsZeroInitialEta) {
  json j = bundled_json();
  // Half-turn away from the desired orientation at t = 0 (identity).
  j["initial"]["orientation"] = {0.0, 1.0, 0.0, 0.0};
  const std::string err = field_of_error(j.dump());
  EXPECT_NE(err.find("initial.orientation"), std::string::npos) << err;
}

TEST(ScenarioFormat, ReportsFieldPaths) {
  json j = bundled_json();
  j["controller"]["k_p"] = -1.0;
  EXPECT_NE(field_of_error(j.dump()).find("controller.k_p"), std::string::npos);

  j = bundled_json();
  j["controller"]["k_pp"] = 1.0;
  EXPECT_NE(field_of_error(j.dump()).find("controller.k_pp"), std::string::npos);

  j = bundled_json();
  j["agents"][1]["grasp"]["orientation"] = {1.0, 0.1, 0.0, 0.0};
  EXPECT_NE(field_of_error(j.dump()).find("agents[1].grasp.orientation"), std::string::npos);

  j = bundled_json();
  j["agents"] = json::array();
  EXPECT_NE(field_of_error(j.dump()).find("agents"), std::string::npos);

  j = bundled_json();
  j["schema_version"] = 99;
  EXPECT_NE(field_of_error(j.dump()).find("schema_version"), std::string::npos);

  j = bundled_json();
  j["simulation"]["dt"] = "fast";
  EXPECT_NE(field_of_error(j.dump()).find("simulation.dt"), std::string::npos);

  EXPECT_THROW(parse_scenario_text("{ not json"), ScenarioError);
  EXPECT_THROW(parse_scenario_file("/nonexistent/scenario.json"), ScenarioError);
}

TEST(ScenarioFormat, SeedPerturbsTheInitialPoseReproducibly) {
  Scenario s = bundled_scenario("paper_sec5");
  s.initial.position_noise = 1e-3;
  s.initial.angle_noise = 1e-2;
  s.simulation.seed = 7;
  const BuiltScenario a = build_scenario(s), b = build_scenario(s);
  EXPECT_EQ(a.initial.object.position, b.initial.object.position);
  EXPECT_LE((a.initial.object.position - s.initial.position).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_NE(a.initial.object.position, s.initial.position);
  s.simulation.seed = 8;
  EXPECT_NE(build_scenario(s).initial.object.position, a.initial.object.position);
}

sim::SimTrace short_trace(double duration, int log_every) {
  Scenario s = bundled_scenario("paper_sec5");
  s.simulation.duration = duration;
  s.simulation.log_every = log_every;
  const BuiltScenario b = build_scenario(s);
  return sim::run_scenario(b.config, b.initial);
}

TEST(TraceCsv, HeaderAndRowLayout) {
  const std::vector<std::string> h = trace_header(2);
  ASSERT_EQ(h.size(), 31u + 18u * 2u);
  EXPECT_EQ(h.front(), "t");
  EXPECT_EQ(h[4], "quat_eta");
  EXPECT_EQ(h[h.size() - 4], "V");
  EXPECT_EQ(h[27], "u1_1");
  EXPECT_EQ(h.back(), "rigidity_drift");

  const sim::SimTrace trace = short_trace(0.5, 5);
  std::stringstream csv;
  write_trace(trace, csv);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), ',') + 1, 67);
  int rows = 0;
  double last_t = -1.0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 66);
    const double t = std::stod(line.substr(0, line.find(',')));
    if (rows > 0) EXPECT_NEAR(t - last_t, 5e-3, 1e-12);
    EXPECT_GT(t, last_t);
    last_t = t;
    ++rows;
  }
  EXPECT_EQ(rows, 0.5 / 1e-3 / 5 + 1);
}

TEST(TraceCsv, ReingestReproducesTerminalStatsExactly) {
  const sim::SimTrace trace = short_trace(1.0, 10);
  const fs::path path = scratch_dir("csv") / "trace.csv";
  emit_trace(trace, path.string());
  const std::vector<sim::TraceRow> back = read_trace(path.string());
  ASSERT_EQ(back.size(), trace.rows.size());
  const sim::TerminalStats a = sim::terminal_stats(trace.rows);
  const sim::TerminalStats b = sim::terminal_stats(back);
  EXPECT_EQ(a.max_e_p, b.max_e_p);
  EXPECT_EQ(a.rms_e_p, b.rms_e_p);
  EXPECT_EQ(a.max_e_eps, b.max_e_eps);
  EXPECT_EQ(a.rms_e_v, b.rms_e_v);
  EXPECT_EQ(a.final_abs_e_eta, b.final_abs_e_eta);
  EXPECT_EQ(back.back().f[1], trace.rows.back().f[1]);

  std::stringstream bad("t,p_x\n0,1\n");
  EXPECT_THROW(read_trace(bad), std::runtime_error);
  EXPECT_THROW(emit_trace(trace, "/nonexistent/dir/trace.csv"), std::runtime_error);
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "coopsim");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::stringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TEST(RunCli, UsageErrors) {
  std::string err;
  EXPECT_EQ(run({"run", "paper_sec5", "--bogus"}, nullptr, &err), 1);
  EXPECT_NE(err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"run", "missing_scenario"}), 1);
  EXPECT_EQ(run({"run", "paper_sec5", "--controller", "fuzzy"}), 1);
  EXPECT_EQ(run({"run", "paper_sec5", "--sweep", "k_q=1,2"}), 1);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST(RunCli, ListCheckDump) {
  std::string out;
  EXPECT_EQ(run({"list"}, &out), 0);
  EXPECT_NE(out.find("paper_sec5"), std::string::npos);
  EXPECT_EQ(run({"check", "paper_sec5"}), 0);
  EXPECT_EQ(run({"dump", "paper_sec5"}, &out), 0);
  EXPECT_TRUE(parse_scenario_text(out) == bundled_scenario("paper_sec5"));

  const fs::path dir = scratch_dir("check");
  json j = bundled_json();
  j["controller"]["load_sharing"] = {0.6, 0.6};
  std::ofstream(dir / "bad.json") << j.dump();
  std::string err;
  EXPECT_EQ(run({"check", (dir / "bad.json").string()}, nullptr, &err), 1);
  EXPECT_NE(err.find("load-sharing sum"), std::string::npos);
}

TEST(RunCli, RunWritesTraceReportAndSummary) {
  const fs::path dir = scratch_dir("run");
  EXPECT_EQ(run({"run", "paper_sec5", "-o", dir.string(), "--duration", "1", "-q"}), 0);
  const json summary = json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(summary["status"], "converged");
  EXPECT_EQ(summary["exit_code"], 0);
  const std::vector<sim::TraceRow> rows = read_trace((dir / "trace.csv").string());
  EXPECT_EQ(rows.size(), 101u);
  EXPECT_FALSE(read_file(dir / "report.txt").empty());

  // Same inputs, same bytes.
  const fs::path again = scratch_dir("run_again");
  EXPECT_EQ(run({"run", "paper_sec5", "-o", again.string(), "--duration", "1", "-q"}), 0);
  EXPECT_EQ(read_file(dir / "trace.csv"), read_file(again / "trace.csv"));
}

TEST(RunCli, OverridesApply) {
  const fs::path dir = scratch_dir("overrides");
  EXPECT_EQ(run({"run", "paper_sec5", "-o", dir.string(), "--duration", "0.2", "--dt", "2e-3", "--log-every", "1",
                 "--controller", "adaptive", "--zoh", "--seed", "3", "-q"}),
            4);  // 0.2 s is too short to settle
  const json summary = json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(summary["controller"], "adaptive");
  EXPECT_EQ(read_trace((dir / "trace.csv").string()).size(), 101u);
}

TEST(RunCli, SweepEmitsOneReportPerValue) {
  const fs::path dir = scratch_dir("sweep");
  std::string out;
  const int code = run({"run", "paper_sec5", "-o", dir.string(), "--duration", "1", "--sweep", "k_p=50,150,450"}, &out);
  EXPECT_EQ(code, 0);
  int reports = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "report.txt")) ++reports;
  }
  EXPECT_EQ(reports, 3);
  const json sweep = json::parse(read_file(dir / "sweep.json"));
  EXPECT_EQ(sweep["key"], "k_p");
  EXPECT_EQ(sweep["runs"].size(), 3u);
  for (const char* label : {"== k_p=50 ==", "== k_p=150 ==", "== k_p=450 =="}) {
    EXPECT_NE(out.find(label), std::string::npos) << label;
  }
}

TEST(RunReportFormat, SummaryIsValidJsonWithExitCode) {
  Scenario s = bundled_scenario("paper_sec5");
  s.simulation.duration = 0.5;
  const BuiltScenario b = build_scenario(s);
  const sim::SimTrace trace = sim::run_scenario(b.config, b.initial);
  const RunReport r = make_report(s, trace, 0.25);
  const json j = json::parse(summary_json(r));
  EXPECT_EQ(j["exit_code"], r.exit_code);
  EXPECT_EQ(j["wall_time"], 0.25);
  EXPECT_NE(report_text(r).find(sim::to_string(r.status)), std::string::npos);
}

}  // namespace
}  // namespace coop::cli
