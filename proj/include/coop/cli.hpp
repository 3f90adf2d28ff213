#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coop/scenario.hpp"
#include "coop/sim.hpp"

namespace coop::cli {

// Column names of the trace CSV for `agents` agents.
std::vector<std::string> trace_header(int agents);

// One row per logged step, doubles printed with 17 significant digits.
// Throws std::runtime_error on I/O failure.
void emit_trace(const sim::SimTrace& trace, const std::string& path);
void write_trace(const sim::SimTrace& trace, std::ostream& out);

// Parses a CSV written by emit_trace; the agent count is inferred from the
// header. Throws std::runtime_error on malformed input.
std::vector<sim::TraceRow> read_trace(const std::string& path);
std::vector<sim::TraceRow> read_trace(std::istream& in);

struct RunReport {
  std::string scenario;
  std::string controller;
  sim::Status status = sim::Status::kConverged;
  int exit_code = 0;
  std::string message;
  double duration = 0.0;
  double dt = 0.0;
  int rows = 0;
  sim::TerminalStats terminal;
  sim::LyapunovReport lyapunov;
  double max_drift_position = 0.0;
  double max_drift_orientation = 0.0;
  bool rigidity_flag = false;
  int near_singular_steps = 0;
  double theta_max_abs = 0.0;  // adaptive mode
  double wall_time = 0.0;      // seconds
};

RunReport make_report(const Scenario& scenario, const sim::SimTrace& trace, double wall_time);
std::string summary_json(const RunReport& report);
std::string report_text(const RunReport& report);

// Entry point of the coopsim tool. Returns the process exit code:
// 0 converged, 4 ran to completion without converging, 2 diverged,
// 3 singular, 1 usage or scenario error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coop::cli
