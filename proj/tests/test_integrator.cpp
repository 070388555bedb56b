#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symflow/integrator.hpp"
#include "symflow/kepler.hpp"
#include "symflow/neumann.hpp"
#include "test_support.hpp"

using namespace symflow;
using namespace symflow::testing;

TEST_CASE("rk4_step basics") {
  StateFn zero = [](const Vec& y) { return Vec(y.size(), 0.0); };
  Vec y0 = {1.0, -2.0};
  CHECK(max_diff(rk4_step(zero, y0, 0.1), y0) == 0.0);

  // dx/dt = x: one step reproduces the degree-4 Taylor polynomial of e^h
  StateFn exp_f = [](const Vec& y) { return y; };
  Vec y1 = rk4_step(exp_f, {1.0}, 0.1);
  CHECK(y1[0] == doctest::Approx(1.1051708333333332).epsilon(1e-14));

  StateFn bad = [](const Vec& y) { return Vec(y.size(), std::nan("")); };
  CHECK_THROWS_AS(rk4_step(bad, y0, 0.1), IntegrationError);
}

TEST_CASE("harmonic oscillator closes after one period") {
  StateFn f = [](const Vec& y) { return Vec{y[1], -y[0]}; };
  Vec y0 = {1.0, 0.0};
  Trajectory traj = integrate(f, y0, 2.0 * M_PI, 1e-3);
  CHECK(max_diff(traj.back_state(), y0) < 1e-10);
  CHECK(traj.times.back() == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("integrate records invariants and shortens the last step") {
  StateFn zero = [](const Vec& y) { return Vec(y.size(), 0.0); };
  std::vector<NamedInvariant> invs = {{"first", [](const Vec& y) { return y[0]; }}};
  Trajectory traj = integrate(zero, {3.0}, 1.0, 0.3, std::nullopt, invs);
  REQUIRE(traj.size() == 5);  // 0, .3, .6, .9, 1.0
  CHECK(traj.times.back() == doctest::Approx(1.0));
  for (double v : traj.series("first")) CHECK(v == doctest::Approx(3.0));
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("drift_report on synthetic series") {
  Trajectory traj;
  traj.invariant_names = {"const", "linear"};
  traj.invariant_series.resize(2);
  double t_end = 2.0, b = 0.5;
  for (int i = 0; i <= 100; ++i) {
    double t = t_end * i / 100.0;
    traj.times.push_back(t);
    traj.states.push_back({0.0});
    traj.invariant_series[0].push_back(4.0);
    traj.invariant_series[1].push_back(10.0 + b * t);
  }
  DriftReport rep = drift_report(traj);
  CHECK(rep.row("const").max_abs_drift == 0.0);
  CHECK(rep.row("linear").max_abs_drift == doctest::Approx(b * t_end));
  CHECK(rep.row("linear").max_rel_drift == doctest::Approx(b * t_end / 10.0));

  Trajectory empty;
  CHECK_THROWS_AS(drift_report(empty), std::invalid_argument);
}

TEST_CASE("sphere projection restores constraints and is idempotent") {
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    Rng rng(7 + eps);
    Vec x = random_eps_unit(rng, form);
    Vec y = random_eps_orthogonal(rng, x, form);
    // perturb off the constraint set
    Vec state = vcat(x, y);
    for (double& v : state) v += 1e-3 * rng.sym();

    Vec proj = project_rank_one(state, form, 1.0);
    Vec x1(proj.begin(), proj.begin() + form.dim());
    Vec y1(proj.begin() + form.dim(), proj.end());
    CHECK(std::abs(eps_norm_sq(x1, form) - 1.0) < 1e-14);
    CHECK(std::abs(eps_inner(x1, y1, form)) < 1e-14);

    Vec twice = project_rank_one(proj, form, 1.0);
    CHECK(max_diff(twice, proj) < 1e-13);
  }
}

TEST_CASE("free flow with projection keeps constraint residuals tiny") {
  EpsForm form{3, +1};
  Rng rng(99);
  Vec x = random_eps_unit(rng, form);
  Vec y = random_eps_orthogonal(rng, x, form);
  Vec state0 = vcat(x, y);

  auto f = free_flow(form);
  ProjectFn proj = [form](const Vec& s) { return project_rank_one(s, form, 1.0); };
  std::vector<NamedInvariant> invs = {
      {"norm_sq", [form](const Vec& s) {
         Vec xx(s.begin(), s.begin() + form.dim());
         return eps_norm_sq(xx, form);
       }},
      {"ortho", [form](const Vec& s) {
         Vec xx(s.begin(), s.begin() + form.dim());
         Vec yy(s.begin() + form.dim(), s.end());
         return eps_inner(xx, yy, form);
       }}};
  Trajectory traj = integrate(f, state0, 3.0, 1e-3, proj, invs);
  for (double v : traj.series("norm_sq")) CHECK(std::abs(v - 1.0) < 1e-12);
  for (double v : traj.series("ortho")) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("rk4 convergence factor on a smooth flow") {
  // halving dt reduces the end-state error against a dt/16 reference ~16x
  EpsForm form{2, +1};
  Rng rng(55);
  Vec x = random_eps_unit(rng, form);
  Vec y = random_eps_orthogonal(rng, x, form);
  Mat a(form.dim(), form.dim());
  Vec alphas = {0.4, 1.1, 2.3};
  for (std::size_t i = 0; i < form.dim(); ++i) a(i, i) = alphas[i];
  auto f = neumann_flow(a, form);
  Vec s0 = vcat(x, y);

  double t_end = 1.0, dt = 0.02;
  Vec ref = integrate(f, s0, t_end, dt / 16.0).back_state();
  double e1 = max_diff(integrate(f, s0, t_end, dt).back_state(), ref);
  double e2 = max_diff(integrate(f, s0, t_end, dt / 2.0).back_state(), ref);
  double factor = e1 / e2;
  CHECK(factor > 12.0);
  CHECK(factor < 20.0);
}
