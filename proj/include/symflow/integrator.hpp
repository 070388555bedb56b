#pragma once

#include <functional>
#include <optional>
#include <string>

#include "symflow/linalg.hpp"

namespace symflow {

using StateFn = std::function<Vec(const Vec&)>;
using ProjectFn = std::function<Vec(const Vec&)>;
using ScalarFn = std::function<double(const Vec&)>;

struct NamedInvariant {
  std::string name;
  ScalarFn fn;
};

struct IntegrationError : std::runtime_error {
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Time grid plus per-step states and recorded invariant values.
/// times are strictly increasing; states and each series have equal length.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<std::string> invariant_names;
  std::vector<std::vector<double>> invariant_series;  // aligned with invariant_names

  std::size_t size() const { return times.size(); }
  const Vec& back_state() const { return states.back(); }
  const std::vector<double>& series(const std::string& name) const;
};

struct DriftRow {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  double max_rel_drift = 0.0;  // denominator max(1, |initial|)
};

struct DriftReport {
  std::vector<DriftRow> rows;
  const DriftRow& row(const std::string& name) const;
  double max_rel(const std::string& name) const { return row(name).max_rel_drift; }
};

/// Classical fixed-step RK4 update. Throws IntegrationError on non-finite
/// stage derivatives.
Vec rk4_step(const StateFn& f, const Vec& state, double dt);

/// Steps from t = 0 to t_end (last step shortened to land exactly on t_end),
/// applying `project` after each step when given and recording every
/// invariant at every grid point, including t = 0.
Trajectory integrate(const StateFn& f, const Vec& state0, double t_end, double dt,
                     const std::optional<ProjectFn>& project = std::nullopt,
                     const std::vector<NamedInvariant>& invariants = {});

DriftReport drift_report(const Trajectory& traj);

}  // namespace symflow
