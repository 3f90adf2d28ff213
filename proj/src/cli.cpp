#include "coop/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "coop/errors.hpp"

namespace coop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFixedColumns = 1 + 3 + 4 + 6 + 3 + 1 + 3 + 6;  // t .. e_v
constexpr int kTailColumns = 4;                                // V .. rigidity_drift
constexpr int kAgentColumns = 18;

void put(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  if (!line.empty()) line += ',';
  line += buf;
}

template <typename Vec>
void put_all(std::string& line, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put(line, v[i]);
}

}  // namespace

std::vector<std::string> trace_header(int agents) {
  std::vector<std::string> h{"t", "p_x", "p_y", "p_z", "quat_eta", "quat_eps1", "quat_eps2", "quat_eps3",
                             "v_x", "v_y", "v_z", "w_x", "w_y", "w_z", "e_p_x", "e_p_y", "e_p_z", "e_eta",
                             "e_eps1", "e_eps2", "e_eps3"};
  for (int k = 1; k <= 6; ++k) h.push_back("e_v" + std::to_string(k));
  for (int i = 1; i <= agents; ++i) {
    for (const char* name : {"u", "tau", "f"}) {
      for (int k = 1; k <= 6; ++k) h.push_back(std::string(name) + std::to_string(i) + "_" + std::to_string(k));
    }
  }
  for (const char* name : {"V", "Vdot_fd", "f_int_norm", "rigidity_drift"}) h.emplace_back(name);
  return h;
}

void write_trace(const sim::SimTrace& trace, std::ostream& out) {
  const std::vector<std::string> header = trace_header(trace.agents);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (const sim::TraceRow& r : trace.rows) {
    line.clear();
    put(line, r.t);
    put_all(line, r.p);
    put_all(line, r.quat);
    put_all(line, r.v);
    put_all(line, r.e_p);
    put(line, r.e_eta);
    put_all(line, r.e_eps);
    put_all(line, r.e_v);
    for (int i = 0; i < trace.agents; ++i) {
      put_all(line, r.u[i]);
      put_all(line, r.tau[i]);
      put_all(line, r.f[i]);
    }
    put(line, r.V);
    put(line, r.Vdot_fd);
    put(line, r.f_int_norm);
    put(line, r.rigidity_drift);
    out << line << '\n';
  }
}

void emit_trace(const sim::SimTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trace(trace, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<sim::TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: missing header");
  const long columns = std::count(line.begin(), line.end(), ',') + 1;
  const long agent_part = columns - kFixedColumns - kTailColumns;
  if (agent_part < 0 || agent_part % kAgentColumns != 0) throw std::runtime_error("trace: unexpected column count");
  const int agents = static_cast<int>(agent_part / kAgentColumns);
  {
    const std::vector<std::string> expected = trace_header(agents);
    std::string joined;
    for (std::size_t i = 0; i < expected.size(); ++i) joined += (i ? "," : "") + expected[i];
    if (joined != line) throw std::runtime_error("trace: header does not match the documented columns");
  }
  std::vector<sim::TraceRow> rows;
  std::vector<double> cells;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    cells.clear();
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      cells.push_back(std::strtod(p, &end));
      if (end == p) throw std::runtime_error("trace: bad number on line " + std::to_string(line_no));
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0' || *end == '\r') {
        break;
      } else {
        throw std::runtime_error("trace: bad number on line " + std::to_string(line_no));
      }
    }
    if (static_cast<long>(cells.size()) != columns) {
      throw std::runtime_error("trace: wrong column count on line " + std::to_string(line_no));
    }
    std::size_t k = 0;
    auto take = [&](auto& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cells[k++];
    };
    sim::TraceRow r;
    r.t = cells[k++];
    take(r.p);
    take(r.quat);
    take(r.v);
    take(r.e_p);
    r.e_eta = cells[k++];
    take(r.e_eps);
    take(r.e_v);
    for (int i = 0; i < agents; ++i) {
      Vector6d u, tau, f;
      take(u);
      take(tau);
      take(f);
      r.u.push_back(u);
      r.tau.push_back(tau);
      r.f.push_back(f);
    }
    r.V = cells[k++];
    r.Vdot_fd = cells[k++];
    r.f_int_norm = cells[k++];
    r.rigidity_drift = cells[k++];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<sim::TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trace(in);
}

RunReport make_report(const Scenario& scenario, const sim::SimTrace& trace, double wall_time) {
  RunReport r;
  r.scenario = scenario.name;
  r.controller = scenario.controller.mode;
  r.status = trace.status;
  r.exit_code = sim::exit_code(trace.status);
  r.message = trace.message;
  r.duration = scenario.simulation.duration;
  r.dt = trace.dt;
  r.rows = static_cast<int>(trace.rows.size());
  r.terminal = sim::terminal_stats(trace.rows);
  r.lyapunov = sim::lyapunov_monitor(trace);
  r.max_drift_position = trace.max_drift_position;
  r.max_drift_orientation = trace.max_drift_orientation;
  r.rigidity_flag = trace.rigidity_flag;
  r.near_singular_steps = trace.near_singular_steps;
  for (const VectorXd& th : trace.final_theta_hat) {
    if (th.size()) r.theta_max_abs = std::max(r.theta_max_abs, th.cwiseAbs().maxCoeff());
  }
  r.wall_time = wall_time;
  return r;
}

std::string summary_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["controller"] = r.controller;
  j["status"] = sim::to_string(r.status);
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  j["duration"] = r.duration;
  j["dt"] = r.dt;
  j["rows"] = r.rows;
  j["terminal"] = {{"window_start", r.terminal.window_start}, {"max_e_p", r.terminal.max_e_p},
                   {"rms_e_p", r.terminal.rms_e_p},           {"max_e_eps", r.terminal.max_e_eps},
                   {"rms_e_eps", r.terminal.rms_e_eps},       {"max_e_v", r.terminal.max_e_v},
                   {"rms_e_v", r.terminal.rms_e_v},           {"final_abs_e_eta", r.terminal.final_abs_e_eta}};
  j["lyapunov"] = {{"steps", r.lyapunov.steps},
                   {"violations", r.lyapunov.violations},
                   {"max_increase", r.lyapunov.max_increase},
                   {"tolerance", r.lyapunov.tolerance},
                   {"rate_samples", r.lyapunov.rate_samples},
                   {"max_rate_error", r.lyapunov.max_rate_error},
                   {"max_rate_error_linear", r.lyapunov.max_rate_error_linear},
                   {"descent_ok", r.lyapunov.descent_ok()}};
  j["rigidity"] = {{"max_drift_position", r.max_drift_position},
                   {"max_drift_orientation", r.max_drift_orientation},
                   {"flag", r.rigidity_flag}};
  j["near_singular_steps"] = r.near_singular_steps;
  j["theta_max_abs"] = r.theta_max_abs;
  j["wall_time"] = r.wall_time;
  return j.dump(2) + "\n";
}

std::string report_text(const RunReport& r) {
  std::ostringstream o;
  o.precision(6);
  o << "scenario            " << r.scenario << " (" << r.controller << ")\n";
  o << "status              " << sim::to_string(r.status) << " (exit " << r.exit_code << ")\n";
  if (!r.message.empty()) o << "message             " << r.message << "\n";
  o << "duration / dt       " << r.duration << " s / " << r.dt << " s, " << r.rows << " rows\n";
  o << "terminal window     t >= " << r.terminal.window_start << " s\n";
  o << "  |e_p|   max/rms   " << r.terminal.max_e_p << " / " << r.terminal.rms_e_p << " m\n";
  o << "  |e_eps| max/rms   " << r.terminal.max_e_eps << " / " << r.terminal.rms_e_eps << "\n";
  o << "  |e_v|   max/rms   " << r.terminal.max_e_v << " / " << r.terminal.rms_e_v << "\n";
  o << "  final |e_eta|     " << std::setprecision(17) << r.terminal.final_abs_e_eta << std::setprecision(6) << "\n";
  o << "Lyapunov descent    " << (r.lyapunov.descent_ok() ? "ok" : "VIOLATED") << " (" << r.lyapunov.violations
    << " of " << r.lyapunov.steps << " steps, max increase " << r.lyapunov.max_increase << ", tolerance "
    << r.lyapunov.tolerance << ")\n";
  o << "V rate mismatch     " << r.lyapunov.max_rate_error << " (e_eta squared), " << r.lyapunov.max_rate_error_linear
    << " (first power) over " << r.lyapunov.rate_samples << " samples\n";
  o << "rigidity drift      " << r.max_drift_position << " m, " << r.max_drift_orientation << " rad"
    << (r.rigidity_flag ? "  FLAGGED" : "") << "\n";
  o << "near-singular steps " << r.near_singular_steps << "\n";
  if (r.controller == "adaptive") o << "max |theta_hat|     " << r.theta_max_abs << "\n";
  o << "wall time           " << r.wall_time << " s\n";
  return o.str();
}

namespace {

struct Job {
  std::string label;
  Scenario scenario;
  fs::path dir;
};

struct JobResult {
  bool ok = false;
  std::string error;
  RunReport report;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

JobResult execute(const Job& job) {
  JobResult res;
  try {
    const auto start = std::chrono::steady_clock::now();
    const BuiltScenario built = build_scenario(job.scenario);
    const sim::SimTrace trace = sim::run_scenario(built.config, built.initial);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.report = make_report(job.scenario, trace, wall);
    fs::create_directories(job.dir);
    emit_trace(trace, (job.dir / job.scenario.output.trace).string());
    write_file(job.dir / job.scenario.output.report, report_text(res.report));
    write_file(job.dir / job.scenario.output.summary, summary_json(res.report));
    res.ok = true;
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

// Worst outcome first: usage/scenario errors, singular, diverged, not converged.
int combine_exit_codes(const std::vector<int>& codes) {
  for (int c : {1, 3, 2, 4}) {
    if (std::find(codes.begin(), codes.end(), c) != codes.end()) return c;
  }
  return 0;
}

void apply_sweep_value(Scenario& s, const std::string& key, double value) {
  const std::size_t n = s.agents.size();
  if (key == "k_p") {
    s.controller.k_p = value;
  } else if (key == "k_eps") {
    s.controller.k_eps = value;
  } else if (key == "k_v") {
    s.controller.k_v.assign(n, value);
  } else if (key == "gamma") {
    s.controller.gamma.assign(n, value);
  } else if (key == "estimate_scale") {
    s.controller.estimate_scale = value;
  } else if (key == "object_mass_scale") {
    s.controller.object_mass_scale = value;
  } else if (key == "dt") {
    s.simulation.dt = value;
  } else if (key == "duration") {
    s.simulation.duration = value;
  } else {
    throw CLI::ValidationError("--sweep", "unknown sweep key '" + key +
                                              "' (k_p, k_eps, k_v, gamma, estimate_scale, object_mass_scale, dt, "
                                              "duration)");
  }
}

std::pair<std::string, std::vector<double>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw CLI::ValidationError("--sweep", "expected KEY=V1,V2,...");
  }
  std::vector<double> values;
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw CLI::ValidationError("--sweep", "bad value '" + item + "'");
    values.push_back(v);
  }
  return {spec.substr(0, eq), values};
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized cooperative manipulation simulator", "coopsim"};
  app.require_subcommand(1);

  std::string target;
  std::string out_dir;
  std::optional<double> dt, duration;
  std::optional<std::string> controller;
  std::optional<std::uint64_t> seed;
  std::optional<int> log_every;
  std::string sweep;
  int jobs = 0;
  bool zoh = false;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Run a scenario (bundled name or JSON file)");
  run->add_option("scenario", target, "Bundled scenario name or path to a scenario file")->required();
  run->add_option("-o,--out", out_dir, "Output directory (default out/<scenario name>)");
  run->add_option("--dt", dt, "Override the integration step (s)")->check(CLI::PositiveNumber);
  run->add_option("--duration", duration, "Override the run length (s)")->check(CLI::PositiveNumber);
  run->add_option("--controller", controller, "Override the controller mode")
      ->check(CLI::IsMember({"nonadaptive", "adaptive"}));
  run->add_option("--seed", seed, "Seed for the initial-pose perturbation");
  run->add_option("--log-every", log_every, "Log every N steps")->check(CLI::PositiveNumber);
  run->add_flag("--zoh", zoh, "Hold the control over each step (zero-order hold)");
  run->add_option("--sweep", sweep, "Parameter grid KEY=V1,V2,... (one run per value)");
  run->add_option("-j,--jobs", jobs, "Worker threads for sweeps (default: hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "Do not print the report");

  std::string check_target;
  CLI::App* check = app.add_subcommand("check", "Parse and validate a scenario");
  check->add_option("scenario", check_target, "Bundled scenario name or path")->required();

  std::string dump_target;
  CLI::App* dump = app.add_subcommand("dump", "Print a scenario in canonical JSON form");
  dump->add_option("scenario", dump_target, "Bundled scenario name or path")->required();

  app.add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const std::string& n : bundled_scenario_names()) out << n << "\n";
      return 0;
    }
    if (*check) {
      const Scenario s = load_scenario(check_target);
      out << "ok: " << (s.name.empty() ? check_target : s.name) << " (" << s.agents.size() << " agents, "
          << s.controller.mode << ")\n";
      return 0;
    }
    if (*dump) {
      out << serialize_scenario(load_scenario(dump_target));
      return 0;
    }

    Scenario base = load_scenario(target);
    if (dt) base.simulation.dt = *dt;
    if (duration) base.simulation.duration = *duration;
    if (controller) base.controller.mode = *controller;
    if (seed) base.simulation.seed = *seed;
    if (log_every) base.simulation.log_every = *log_every;
    if (zoh) base.controller.zero_order_hold = true;
    validate_scenario(base);

    const fs::path root = out_dir.empty() ? fs::path("out") / (base.name.empty() ? "scenario" : base.name)
                                          : fs::path(out_dir);
    std::vector<Job> job_list;
    std::string sweep_key;
    if (sweep.empty()) {
      job_list.push_back({base.name, base, root});
    } else {
      auto [key, values] = parse_sweep(sweep);
      sweep_key = key;
      for (double v : values) {
        Scenario s = base;
        apply_sweep_value(s, key, v);
        validate_scenario(s);
        const std::string label = key + "=" + format_value(v);
        job_list.push_back({label, s, root / (key + "_" + format_value(v))});
      }
    }

    std::vector<JobResult> results(job_list.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min<std::size_t>(job_list.size(), jobs > 0 ? static_cast<std::size_t>(jobs) : hw);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < job_list.size(); i = next++) results[i] = execute(job_list[i]);
    };
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    std::vector<int> codes;
    json sweep_summary = json::array();
    for (std::size_t i = 0; i < job_list.size(); ++i) {
      const JobResult& r = results[i];
      if (!r.ok) {
        err << "error (" << job_list[i].label << "): " << r.error << "\n";
        codes.push_back(1);
        continue;
      }
      codes.push_back(r.report.exit_code);
      if (!quiet) {
        if (job_list.size() > 1) out << "== " << job_list[i].label << " ==\n";
        out << report_text(r.report);
      }
      sweep_summary.push_back({{"label", job_list[i].label},
                               {"directory", job_list[i].dir.string()},
                               {"status", sim::to_string(r.report.status)},
                               {"exit_code", r.report.exit_code}});
    }
    if (!sweep.empty()) {
      fs::create_directories(root);
      write_file(root / "sweep.json", json{{"key", sweep_key}, {"runs", sweep_summary}}.dump(2) + "\n");
    }
    return combine_exit_codes(codes);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace coop::cli
