#pragma once

#include <map>
#include <ostream>
#include <string>

#include "symflow/integrator.hpp"

namespace symflow {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_, std::string field_)
      : std::runtime_error(msg), line(line_), field(std::move(field_)) {}
  int line = 0;
  std::string field;
};

/// A flat key-value scenario description. Matrices are given row-wise in
/// the [drift] section, initial data in [state], per-invariant drift
/// thresholds in [thresholds].
struct Scenario {
  std::string kind;  // affine | neumann | jacobi-geodesic | knorrer-conjugacy |
                     // kepler-transport | elastic | pendulum
  std::size_t n = 3;
  int eps = 1;
  double s = 1.0;
  double t_end = 10.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double h = 1.0;  // stereographic radius (kepler-transport)

  std::string a_type = "diagonal";  // diagonal | block | explicit | e1
  Vec a_values;                     // diagonal entries
  double a_alpha = 1.0;             // block rotation parameter
  Vec a_d;                          // block diagonal tail
  std::vector<Vec> a_rows;          // explicit rows

  std::string state_type = "random";  // random | explicit
  double state_scale = 0.5;
  std::map<std::string, Vec> state_vectors;  // x, y, p, rho, l, ...

  std::map<std::string, double> thresholds;
  double default_threshold = 1e-9;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

struct RunResult {
  Trajectory traj;
  std::vector<std::string> state_labels;
  DriftReport drift;
  std::map<std::string, double> resolved_thresholds;  // per drift row
  // kind-specific scalar checks: name -> (value, threshold); pass when
  // |value| <= threshold
  std::vector<std::string> check_names;
  std::map<std::string, double> check_values;
  std::map<std::string, double> check_thresholds;
  std::map<std::string, std::string> summary_text;  // e.g. conic type
  bool pass = true;
};

RunResult run_scenario(const Scenario& sc);

std::vector<std::string> list_invariants(const std::string& kind, std::size_t n, int eps,
                                         double s);

/// CSV layout "t,<state components...>,<invariant names...>" with doubles
/// printed to 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::vector<std::string>& labels,
                          std::ostream& os);

void write_report_json(const RunResult& result, const Scenario& sc, std::ostream& os);

}  // namespace symflow
