#include "symflow/jacobi.hpp"

#include <algorithm>

namespace symflow {

namespace {

double poly_from_roots(const Vec& roots, double z, std::size_t skip = SIZE_MAX) {
  double v = 1.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (k == skip) continue;
    v *= z - roots[k];
  }
  return v;
}

// b(z) = sum_k c_k prod_{j != k} (z - alpha_j); monic of degree n when
// sum c_k = 1.
double b_poly(const Vec& c, const Vec& alphas, double z) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * poly_from_roots(alphas, z, k);
  return s;
}

void check_sorted_distinct(const Vec& alphas) {
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] < alphas[i + 1] - 1e-10))
      throw std::invalid_argument("elliptic chart: alphas must be sorted and distinct");
}

}  // namespace

void validate_quadric(const QuadricState& state, const Mat& a, double tol) {
  Vec ax = solve(a, state.x);
  if (std::abs(eps_inner(state.x, ax, state.form) - 1.0) > tol)
    throw std::invalid_argument("quadric state: (x, A^{-1}x) != 1");
  if (std::abs(eps_inner(state.p, ax, state.form)) > tol)
    throw std::invalid_argument("quadric state: (p, A^{-1}x) != 0");
}

EllipticChart elliptic_coords(const Vec& x, const Vec& alphas) {
  check_sorted_distinct(alphas);
  if (x.size() != alphas.size())
    throw std::invalid_argument("elliptic_coords: dimension mismatch");
  std::size_t n = alphas.size() - 1;

  auto g = [&](double z) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * x[k] / (z - alphas[k]);
    return s;
  };

  EllipticChart chart;
  chart.alphas = alphas;
  chart.u.resize(n);
  chart.degenerate.assign(n, false);
  chart.signs.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) chart.signs[k] = x[k] >= 0.0 ? 1 : -1;

  double span = alphas.back() - alphas.front();
  for (std::size_t k = 0; k < n; ++k) {
    double lo = alphas[k], hi = alphas[k + 1];
    double delta = 1e-12 * span;
    double fa = g(lo + delta), fb = g(hi - delta);
    if (!(fa > 0.0 && fb < 0.0)) {
      // a vanishing x component collapsed this interval onto a boundary
      chart.degenerate[k] = true;
      chart.u[k] = fa <= 0.0 ? alphas[k] : alphas[k + 1];
      continue;
    }
    double a = lo + delta, b = hi - delta;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, span); ++it) {
      double mid = 0.5 * (a + b);
      double fm = g(mid);
      if (fm > 0.0)
        a = mid;
      else
        b = mid;
    }
    chart.u[k] = 0.5 * (a + b);
  }
  return chart;
}

Vec x_from_elliptic(const EllipticChart& chart) {
  check_sorted_distinct(chart.alphas);
  std::size_t n = chart.u.size();
  if (chart.alphas.size() != n + 1)
    throw std::invalid_argument("x_from_elliptic: size mismatch");
  Vec x(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double m_at = poly_from_roots(chart.u, chart.alphas[k]);
    double ap = poly_from_roots(chart.alphas, chart.alphas[k], k);
    double r = m_at / ap;
    if (r < -1e-12) throw std::domain_error("x_from_elliptic: interlacing violated");
    r = std::max(r, 0.0);
    int sign = k < chart.signs.size() ? chart.signs[k] : 1;
    x[k] = sign * std::sqrt(r);
  }
  return x;
}

Vec separated_rhs(const EllipticChart& chart, const Vec& c, const std::vector<int>& branch) {
  std::size_t n = chart.u.size();
  if (c.size() != chart.alphas.size())
    throw std::invalid_argument("separated_rhs: need one constant per alpha");
  Vec du(n);
  for (std::size_t k = 0; k < n; ++k) {
    double uk = chart.u[k];
    double a_u = poly_from_roots(chart.alphas, uk);
    double b_u = b_poly(c, chart.alphas, uk);
    double mp = poly_from_roots(chart.u, uk, k);
    if (std::abs(mp) < 1e-12)
      throw std::domain_error("separated_rhs: coinciding elliptic coordinates");
    double radicand = -a_u * b_u;
    if (radicand < -1e-10 * std::max(1.0, std::abs(a_u * b_u)))
      throw std::domain_error("separated_rhs: negative radicand -a(u)b(u)");
    radicand = std::max(radicand, 0.0);
    int sign = branch.empty() ? 1 : branch[k];
    du[k] = sign * 2.0 * std::sqrt(radicand) / mp;
  }
  return du;
}

Vec resolvent_pairings(const EllipticChart& chart, const Vec& x, const Vec& y) {
  std::size_t n = chart.u.size();
  Vec r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i] / (chart.u[k] - chart.alphas[i]);
    r[k] = s;
  }
  return r;
}

Vec separated_velocity_from_state(const EllipticChart& chart, const Vec& x, const Vec& y) {
  std::size_t n = chart.u.size();
  Vec pair = resolvent_pairings(chart, x, y);
  Vec du(n);
  for (std::size_t k = 0; k < n; ++k) {
    double uk = chart.u[k];
    double a_u = poly_from_roots(chart.alphas, uk);
    double mp = poly_from_roots(chart.u, uk, k);
    du[k] = -2.0 * a_u * pair[k] / mp;
  }
  return du;
}

EllipticFrame frame_norms(const EllipticChart& chart, const Vec& x) {
  std::size_t n = chart.u.size();
  EllipticFrame frame;
  frame.vectors.resize(n);
  frame.norm_sq.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double uk = chart.u[k];
    Vec v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = 0.5 * x[i] / (uk - chart.alphas[i]);
    frame.vectors[k] = std::move(v);
    double a_u = poly_from_roots(chart.alphas, uk);
    double mp = poly_from_roots(chart.u, uk, k);
    if (std::abs(a_u) < 1e-300)
      throw std::domain_error("frame_norms: u_k collided with an eigenvalue");
    frame.norm_sq[k] = -0.25 * mp / a_u;
  }
  return frame;
}

double knorrer_f0(const Vec& u, const Vec& v, const Mat& a, const EpsForm& form) {
  Vec au = a * u;
  Vec av = a * v;
  return (eps_inner(v, av, form) - 1.0) * eps_inner(u, au, form) -
         eps_inner(u, av, form) * eps_inner(u, av, form);
}

QuadricState knorrer_forward(double lambda, const Vec& u, const Vec& v, const Mat& a,
                             const EpsForm& form) {
  if (std::abs(eps_norm_sq(u, form) - 1.0) > 1e-8)
    throw std::invalid_argument("knorrer_forward: ||u||_eps != 1");
  if (std::abs(eps_inner(u, v, form)) > 1e-8)
    throw std::invalid_argument("knorrer_forward: (u,v)_eps != 0");
  double f0 = knorrer_f0(u, v, a, form);
  if (std::abs(f0) > 1e-8)
    throw std::invalid_argument("knorrer_forward: F0 != 0 (off the Neumann manifold)");
  Vec au = a * u;
  double auu = eps_inner(au, u, form);
  if (!(auu > 0.0)) throw std::domain_error("knorrer_forward: (Au,u)_eps <= 0");
  double root = std::sqrt(auu);
  Vec av = a * v;
  double auv = eps_inner(au, v, form);
  QuadricState out;
  out.form = form;
  out.x = vscale(1.0 / root, au);
  out.p.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out.p[i] = (lambda / root) * (av[i] - (auv / auu) * au[i]);
  return out;
}

NeumannSide knorrer_inverse(const QuadricState& state, const Mat& a) {
  const EpsForm& form = state.form;
  Vec aix = solve(a, state.x);
  Vec aip = solve(a, state.p);
  double nx2 = eps_norm_sq(aix, form);
  if (!(nx2 > 0.0)) throw std::domain_error("knorrer_inverse: ||A^{-1}x||_eps^2 <= 0");
  double pp = eps_inner(aip, state.p, form);
  if (!(pp > 0.0)) throw std::domain_error("knorrer_inverse: (A^{-1}p, p)_eps <= 0");
  double nx = std::sqrt(nx2);
  NeumannSide out;
  out.lambda = std::sqrt(pp) / nx;
  out.u = vscale(1.0 / nx, aix);
  double c = eps_inner(out.u, aip, form);
  out.v.resize(aip.size());
  double rt = std::sqrt(pp);
  for (std::size_t i = 0; i < aip.size(); ++i) out.v[i] = (aip[i] - c * out.u[i]) / rt;
  return out;
}

std::pair<Vec, Vec> geodesic_rhs(const QuadricState& state, const Mat& a) {
  const EpsForm& form = state.form;
  Vec aix = solve(a, state.x);
  Vec aip = solve(a, state.p);
  double nx2 = eps_norm_sq(aix, form);
  if (std::abs(nx2) < 1e-14) throw std::domain_error("geodesic_rhs: ||A^{-1}x||_eps = 0");
  double c = eps_inner(state.p, aip, form) / nx2;
  return {state.p, vscale(-c, aix)};
}

StateFn geodesic_flow(const Mat& a, const EpsForm& form) {
  Mat ainv = inverse(a);
  return [ainv, form](const Vec& state) {
    auto [x, p] = unpack_phase(state, form.dim());
    Vec aix = ainv * x;
    Vec aip = ainv * p;
    double nx2 = eps_norm_sq(aix, form);
    if (std::abs(nx2) < 1e-14)
      throw IntegrationError("geodesic_flow: ||A^{-1}x||_eps = 0");
    double c = eps_inner(p, aip, form) / nx2;
    return pack_phase(p, vscale(-c, aix));
  };
}

double G_of_z(const QuadricState& state, const Mat& a, double z) {
  const EpsForm& form = state.form;
  std::size_t n = a.rows();
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? z : 0.0) - a(i, j);
  Vec sx = solve(m, state.x);
  Vec sp = solve(m, state.p);
  if (vnorm(sx) > 1e8 * std::max(vnorm(state.x), 1e-30))
    throw std::domain_error("G_of_z: z within ~1e-8 of the spectrum of A");
  double sxx = eps_inner(sx, state.x, form);
  double spp = eps_inner(sp, state.p, form);
  double sxp = eps_inner(sx, state.p, form);
  return (1.0 + sxx) * spp - sxp * sxp;
}

Vec residues_geodesic(const QuadricState& state, const Vec& alphas) {
  if (state.form.eps != 1)
    throw std::invalid_argument("residues_geodesic: requires eps = +1");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = i + 1; j < alphas.size(); ++j)
      if (std::abs(alphas[i] - alphas[j]) < 1e-10)
        throw std::invalid_argument("residues_geodesic: repeated eigenvalues");
  const Vec& x = state.x;
  const Vec& p = state.p;
  Vec g(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    double v = p[k] * p[k];
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (j == k) continue;
      double w = x[j] * p[k] - x[k] * p[j];
      v += w * w / (alphas[k] - alphas[j]);
    }
    g[k] = v;
  }
  return g;
}

double joachimsthal(const QuadricState& state, const Mat& a) {
  Vec aix = solve(a, state.x);
  Vec aip = solve(a, state.p);
  return eps_norm_sq(aix, state.form) * eps_inner(aip, state.p, state.form);
}

Vec pack_conjugacy(const Vec& u, const Vec& v, double lambda, double t) {
  Vec s = vcat(u, v);
  s.push_back(lambda);
  s.push_back(t);
  return s;
}

ConjugacyState unpack_conjugacy(const Vec& state, std::size_t dim) {
  if (state.size() != 2 * dim + 2)
    throw std::invalid_argument("unpack_conjugacy: size mismatch");
  ConjugacyState c;
  c.u = Vec(state.begin(), state.begin() + dim);
  c.v = Vec(state.begin() + dim, state.begin() + 2 * dim);
  c.lambda = state[2 * dim];
  c.t = state[2 * dim + 1];
  return c;
}

StateFn knorrer_conjugacy_flow(const Mat& a, const EpsForm& form) {
  Mat ainv = inverse(a);
  return [a, ainv, form](const Vec& state) {
    ConjugacyState c = unpack_conjugacy(state, form.dim());
    RankOneState s{c.u, c.v, form, 1.0};
    auto [du, dv] = neumann_rhs(s, ainv);
    Vec au = a * c.u;
    double dlambda = 2.0 * (eps_inner(au, c.v, form) / eps_inner(au, c.u, form)) * c.lambda;
    double dt = 1.0 / c.lambda;
    return pack_conjugacy(du, dv, dlambda, dt);
  };
}

}  // namespace symflow
