#include "symflow/integrator.hpp"

#include <algorithm>

namespace symflow {

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (std::size_t i = 0; i < invariant_names.size(); ++i)
    if (invariant_names[i] == name) return invariant_series[i];
  throw std::out_of_range("Trajectory::series: no invariant named " + name);
}

const DriftRow& DriftReport::row(const std::string& name) const {
  for (const DriftRow& r : rows)
    if (r.name == name) return r;
  throw std::out_of_range("DriftReport::row: no invariant named " + name);
}

namespace {
Vec stage(const StateFn& f, const Vec& y, double at_time_unused, const char* label) {
  (void)at_time_unused;
  Vec k = f(y);
  if (!all_finite(k))
    throw IntegrationError(std::string("rk4_step: non-finite derivative at stage ") + label);
  return k;
}
}  // namespace

Vec rk4_step(const StateFn& f, const Vec& state, double dt) {
  if (!(dt > 0.0)) throw IntegrationError("rk4_step: dt must be positive");
  Vec k1 = stage(f, state, 0, "k1");
  Vec k2 = stage(f, vadd(state, vscale(0.5 * dt, k1)), 0, "k2");
  Vec k3 = stage(f, vadd(state, vscale(0.5 * dt, k2)), 0, "k3");
  Vec k4 = stage(f, vadd(state, vscale(dt, k3)), 0, "k4");
  Vec out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    out[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Trajectory integrate(const StateFn& f, const Vec& state0, double t_end, double dt,
                     const std::optional<ProjectFn>& project,
                     const std::vector<NamedInvariant>& invariants) {
  if (!(t_end > 0.0) || !(dt > 0.0))
    throw IntegrationError("integrate: t_end and dt must be positive");

  Trajectory traj;
  traj.invariant_names.reserve(invariants.size());
  traj.invariant_series.resize(invariants.size());
  for (const auto& inv : invariants) traj.invariant_names.push_back(inv.name);

  auto record = [&](double t, const Vec& y) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    for (std::size_t i = 0; i < invariants.size(); ++i)
      traj.invariant_series[i].push_back(invariants[i].fn(y));
  };

  Vec y = state0;
  record(0.0, y);
  // grid points at i*dt with the last step shortened to land exactly on
  // t_end; multiplicative time arithmetic avoids accumulation micro-steps
  std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  if (n_steps == 0) n_steps = 1;
  double t = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    double t_next = i == n_steps ? t_end : static_cast<double>(i) * dt;
    try {
      y = rk4_step(f, y, t_next - t);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string(e.what()) + " at t = " + std::to_string(t));
    }
    if (project) y = (*project)(y);
    if (!all_finite(y))
      throw IntegrationError("integrate: non-finite state at t = " + std::to_string(t_next));
    t = t_next;
    record(t, y);
  }
  return traj;
}

DriftReport drift_report(const Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("drift_report: empty trajectory");
  DriftReport rep;
  for (std::size_t i = 0; i < traj.invariant_names.size(); ++i) {
    const auto& series = traj.invariant_series[i];
    DriftRow row;
    row.name = traj.invariant_names[i];
    row.initial = series.front();
    for (double v : series) row.max_abs_drift = std::max(row.max_abs_drift, std::abs(v - row.initial));
    row.max_rel_drift = row.max_abs_drift / std::max(1.0, std::abs(row.initial));
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace symflow
