#include "symflow/kepler.hpp"

#include <algorithm>

namespace symflow {

std::pair<Vec, Vec> free_rhs(const RankOneState& state) {
  double n2 = eps_norm_sq(state.x, state.form);
  double y2 = eps_norm_sq(state.y, state.form);
  return {vscale(n2, state.y), vscale(-y2, state.x)};
}

StateFn free_flow(const EpsForm& form) {
  return [form](const Vec& state) {
    auto [x, y] = unpack_phase(state, form.dim());
    RankOneState s{std::move(x), std::move(y), form, 1.0};
    auto [dx, dy] = free_rhs(s);
    return pack_phase(dx, dy);
  };
}

Mat wedge_euclid(const Vec& a, const Vec& b) {
  Mat m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j] - b[i] * a[j];
  return m;
}

Vec stereo_project(const Vec& x, const StereoParams& params) {
  if (x.size() != params.n + 1) throw std::invalid_argument("stereo_project: bad dimension");
  double h = params.h;
  EpsForm form = params.form();
  if (std::abs(eps_norm_sq(x, form) - h * h) > 1e-8 * std::max(1.0, h * h))
    throw std::invalid_argument("stereo_project: x not on ||x||_eps^2 = h^2");
  if (std::abs(h - x[0]) < 1e-12 * std::max(1.0, h))
    throw std::domain_error("stereo_project: x at the projection pole x0 = h");
  double f = h / (h - x[0]);
  Vec p(params.n);
  for (std::size_t i = 0; i < params.n; ++i) p[i] = f * x[i + 1];
  return p;
}

Vec stereo_point(const Vec& p, const StereoParams& params) {
  if (p.size() != params.n) throw std::invalid_argument("stereo_point: bad dimension");
  double h = params.h, eps = params.eps;
  double p2 = vdot(p, p);
  double denom = p2 + eps * h * h;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("stereo_point: ||p||^2 + eps h^2 = 0");
  Vec x(params.n + 1);
  x[0] = h * (p2 - eps * h * h) / denom;
  double f = 2.0 * eps * h * h / denom;
  for (std::size_t i = 0; i < params.n; ++i) x[i + 1] = f * p[i];
  return x;
}

std::pair<Vec, Vec> stereo_lift(const Vec& q, const Vec& p, const StereoParams& params) {
  if (q.size() != params.n || p.size() != params.n)
    throw std::invalid_argument("stereo_lift: bad dimension");
  double h = params.h, eps = params.eps;
  Vec x = stereo_point(p, params);
  double qp = vdot(q, p);
  double p2 = vdot(p, p);
  Vec y(params.n + 1);
  y[0] = qp / h;
  double cq = (p2 + eps * h * h) / (2.0 * h * h);
  double cp = qp / (h * h);
  for (std::size_t i = 0; i < params.n; ++i) y[i + 1] = cq * q[i] - cp * p[i];
  return {x, y};
}

KeplerState transport_point(const Vec& x, const Vec& y, const StereoParams& params) {
  double h = params.h, eps = params.eps;
  Vec p = stereo_project(x, params);
  double p2 = vdot(p, p);
  // invert the lift: ybar = cq q - (y0/h) p  with  q.p = h y0
  double cq = (p2 + eps * h * h) / (2.0 * h * h);
  Vec q(params.n);
  for (std::size_t i = 0; i < params.n; ++i) q[i] = (y[i + 1] + (y[0] / h) * p[i]) / cq;
  return {q, p};
}

std::pair<Vec, Vec> kepler_rhs(const KeplerState& state) {
  double r = vnorm(state.q);
  if (r < 1e-12) throw std::domain_error("kepler_rhs: collision, ||q|| < 1e-12");
  double r3 = r * r * r;
  return {state.p, vscale(-1.0 / r3, state.q)};
}

StateFn kepler_flow(std::size_t n) {
  return [n](const Vec& state) {
    auto [q, p] = unpack_phase(state, n);
    auto [dq, dp] = kepler_rhs({std::move(q), std::move(p)});
    return pack_phase(dq, dp);
  };
}

double kepler_energy(const KeplerState& state) {
  return 0.5 * vdot(state.p, state.p) - 1.0 / vnorm(state.q);
}

std::vector<Trajectory> transport_to_kepler(const Trajectory& traj,
                                            const StereoParams& params) {
  double h = params.h, eps = params.eps;
  EpsForm form = params.form();
  if (traj.size() < 2) throw std::invalid_argument("transport_to_kepler: empty trajectory");

  {  // the map only lands on Kepler solutions from the level H = eps/(2h^2)
    auto [x0, y0] = unpack_phase(traj.states.front(), form.dim());
    double ham = 0.5 * eps_norm_sq(x0, form) * eps_norm_sq(y0, form);
    if (std::abs(ham - eps / (2.0 * h * h)) > 1e-8 * std::max(1.0, std::abs(ham)))
      throw std::invalid_argument("transport_to_kepler: not on the level H = eps/(2h^2)");
  }

  std::vector<Trajectory> arcs;
  Trajectory arc;
  double t = 0.0;
  double prev_s = 0.0, prev_r = 0.0;
  auto flush = [&]() {
    if (arc.size() >= 2) {
      if (arc.times.back() < arc.times.front()) {  // eps = +1 runs t backwards
        std::reverse(arc.times.begin(), arc.times.end());
        std::reverse(arc.states.begin(), arc.states.end());
      }
      double origin = arc.times.front();
      for (double& tt : arc.times) tt -= origin;
      arcs.push_back(std::move(arc));
    }
    arc = Trajectory{};
  };

  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto [x, y] = unpack_phase(traj.states[i], form.dim());
    if (std::abs(h - x[0]) < 1e-6 * std::max(1.0, h)) {
      flush();
      continue;
    }
    KeplerState k = transport_point(x, y, params);
    double r = vnorm(k.q);
    double s = traj.times[i];
    if (arc.size() == 0) {
      t = 0.0;
    } else {
      t += (-static_cast<double>(eps) / (h * h)) * 0.5 * (r + prev_r) * (s - prev_s);
    }
    prev_s = s;
    prev_r = r;
    arc.times.push_back(t);
    arc.states.push_back(pack_phase(k.q, k.p));
  }
  flush();
  if (arcs.empty()) throw std::domain_error("transport_to_kepler: no arc clear of the pole");
  return arcs;
}

MomentumLenz momentum_and_lenz(const Vec& x, const Vec& y, const StereoParams& params) {
  double h = params.h;
  double eps = params.eps;
  std::size_t n = params.n;
  if (std::abs(eps_inner(x, y, params.form())) >
      1e-8 * std::max(1.0, vnorm(x) * vnorm(y)))
    throw std::invalid_argument("momentum_and_lenz: (x,y)_eps != 0");
  Vec xbar(x.begin() + 1, x.end());
  Vec ybar(y.begin() + 1, y.end());
  MomentumLenz ml;
  ml.L = wedge_euclid(ybar, xbar) * eps;  // (ybar ^ xbar)_eps restricted to the last n coords
  ml.F.resize(n);
  for (std::size_t i = 0; i < n; ++i) ml.F[i] = h * (x[0] * ybar[i] - y[0] * xbar[i]);
  ml.degenerate = ml.L.max_abs() < 1e-12;
  return ml;
}

ConicReport conic_classify(const Trajectory& traj) {
  if (traj.size() == 0) throw std::invalid_argument("conic_classify: empty trajectory");
  std::size_t n = traj.states.front().size() / 2;
  auto [q0, p0] = unpack_phase(traj.states.front(), n);

  ConicReport rep;
  double l2 = vdot(q0, q0) * vdot(p0, p0) - vdot(q0, p0) * vdot(q0, p0);
  rep.latus_rectum = l2;
  rep.energy = kepler_energy({q0, p0});
  if (l2 < 1e-12) {
    rep.degenerate_line = true;
    rep.type = "line";
    return rep;
  }
  // F = L p - q/||q||
  Mat l = wedge_euclid(q0, p0);
  Vec f = l * p0;
  double r0 = vnorm(q0);
  for (std::size_t i = 0; i < n; ++i) f[i] -= q0[i] / r0;
  double e = vnorm(f);
  rep.eccentricity = e;
  if (std::abs(e - 1.0) < 1e-8)
    rep.type = "parabola";
  else if (e < 1.0)
    rep.type = "ellipse";
  else
    rep.type = "hyperbola";

  for (const Vec& s : traj.states) {
    auto [q, p] = unpack_phase(s, n);
    double r = vnorm(q);
    double cosphi = e > 1e-12 ? vdot(f, q) / (e * r) : 0.0;
    double residual = std::abs(r * (1.0 + e * cosphi) - l2);
    rep.max_focal_residual = std::max(rep.max_focal_residual, residual);
  }
  return rep;
}

StateFn euclidean_free_flow(std::size_t n) {
  return [n](const Vec& state) {
    auto [q, p] = unpack_phase(state, n);
    double p2 = vdot(p, p);
    double q2 = vdot(q, q);
    Vec dq = vscale(-0.5 * p2 * q2, p);
    Vec dp = vscale(0.25 * p2 * p2, q);
    return pack_phase(dq, dp);
  };
}

EuclideanLimitReport euclidean_limit_check(const Trajectory& traj) {
  if (traj.size() < 3) throw std::invalid_argument("euclidean_limit_check: too short");
  std::size_t n = traj.states.front().size() / 2;
  EuclideanLimitReport rep;

  std::vector<Vec> w(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto [q, p] = unpack_phase(traj.states[i], n);
    double p2 = vdot(p, p);
    if (p2 < 1e-14) throw std::domain_error("euclidean_limit_check: ||p|| -> 0");
    w[i] = vscale(2.0 / p2, p);
    rep.max_energy = std::max(rep.max_energy, std::abs(kepler_energy({q, p})));

    // inversion is an involution: p = 2 w / ||w||^2
    Vec back = vscale(2.0 / vdot(w[i], w[i]), w[i]);
    rep.max_roundtrip = std::max(rep.max_roundtrip, vmax_abs(vsub(back, p)));
  }

  // straightness: second-derivative estimate on the (possibly nonuniform) grid
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    double h0 = traj.times[i] - traj.times[i - 1];
    double h1 = traj.times[i + 1] - traj.times[i];
    Vec second(n);
    for (std::size_t j = 0; j < n; ++j)
      second[j] = 2.0 * (h1 * w[i - 1][j] - (h0 + h1) * w[i][j] + h0 * w[i + 1][j]) /
                  (h0 * h1 * (h0 + h1));
    rep.max_w_second_diff = std::max(rep.max_w_second_diff, vmax_abs(second));
  }

  // parabola: q(t) = 1/2 (b(||a||^2 - ||b||^2 t^2) - 2a((a,b) + ||b||^2 t))
  // with a = w(0) and b = dw/dt = (||p||^2/2) q - (p.q) p evaluated at t = 0
  Vec a = w.front();
  Vec b;
  {
    auto [q0, p0] = unpack_phase(traj.states.front(), n);
    double p2 = vdot(p0, p0);
    b = vsub(vscale(0.5 * p2, q0), vscale(vdot(p0, q0), p0));
  }
  double a2 = vdot(a, a), b2 = vdot(b, b), ab = vdot(a, b);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double t = traj.times[i];
    auto [q, p] = unpack_phase(traj.states[i], n);
    Vec pred = vsub(vscale(0.5 * (a2 - b2 * t * t), b), vscale(ab + b2 * t, a));
    rep.max_parabola_residual = std::max(rep.max_parabola_residual, vmax_abs(vsub(pred, q)));
  }
  return rep;
}

}  // namespace symflow
