#include "symflow/neumann.hpp"

#include <algorithm>

namespace symflow {

void validate_rank_one(const RankOneState& state, double tol) {
  if (state.x.size() != state.form.dim() || state.y.size() != state.form.dim())
    throw std::invalid_argument("rank-one state: dimension mismatch");
  double n2 = eps_norm_sq(state.x, state.form);
  if (std::abs(n2 - state.radius * state.radius) > tol)
    throw std::invalid_argument("rank-one state: ||x||_eps^2 off the sphere");
  if (std::abs(eps_inner(state.x, state.y, state.form)) > tol)
    throw std::invalid_argument("rank-one state: (x,y)_eps != 0");
}

RankOneState make_rank_one_state(Vec x, Vec y, const EpsForm& form, double radius) {
  RankOneState s{std::move(x), std::move(y), form, radius};
  validate_rank_one(s);
  return s;
}

Vec pack_phase(const Vec& x, const Vec& y) { return vcat(x, y); }

std::pair<Vec, Vec> unpack_phase(const Vec& state, std::size_t dim) {
  if (state.size() != 2 * dim) throw std::invalid_argument("unpack_phase: size mismatch");
  Vec x(state.begin(), state.begin() + dim);
  Vec y(state.begin() + dim, state.end());
  return {x, y};
}

Vec project_rank_one(const Vec& state, const EpsForm& form, double radius) {
  auto [x, y] = unpack_phase(state, form.dim());
  double n2 = eps_norm_sq(x, form);
  if (!(n2 > 0.0))
    throw IntegrationError("project_rank_one: state left the ||x||_eps^2 > 0 sheet");
  double f = radius / std::sqrt(n2);
  for (double& v : x) v *= f;
  double c = eps_inner(x, y, form) / (radius * radius);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * x[i];
  return pack_phase(x, y);
}

CartanElement orbit_embed(const RankOneState& state) {
  validate_rank_one(state);
  std::size_t d = state.form.dim();
  Mat lp = tensor_eps(state.x, state.form);
  double tr = eps_norm_sq(state.x, state.form) / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) lp(i, i) -= tr;
  Mat lk = wedge_eps(state.x, state.y, state.form);
  return {lp, lk};
}

std::pair<Vec, Vec> neumann_rhs(const RankOneState& state, const Mat& a) {
  const EpsForm& form = state.form;
  double n2 = eps_norm_sq(state.x, form);
  if (std::abs(n2) < 1e-14)
    throw std::domain_error("neumann_rhs: ||x||_eps^2 = 0 (null sheet)");
  Vec dx = vscale(n2, state.y);
  Vec ax = a * state.x;
  double c = eps_inner(ax, state.x, form) / n2 - eps_norm_sq(state.y, form);
  Vec dy(state.x.size());
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = -ax[i] + c * state.x[i];
  return {dx, dy};
}

StateFn neumann_flow(const Mat& a, const EpsForm& form) {
  return [a, form](const Vec& state) {
    auto [x, y] = unpack_phase(state, form.dim());
    RankOneState s{std::move(x), std::move(y), form, 1.0};
    auto [dx, dy] = neumann_rhs(s, a);
    return pack_phase(dx, dy);
  };
}

double constrained_hamiltonian(const RankOneState& state, const Mat& a) {
  double pot = eps_inner(a * state.x, state.x, state.form);
  return 0.5 * (eps_norm_sq(state.y, state.form) + pot);
}

namespace {
Vec resolvent_apply(const Mat& a, double z, const Vec& v) {
  std::size_t n = a.rows();
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? z : 0.0) - a(i, j);
  Vec r = solve(m, v);
  // ||R_z v|| >= dist(z, spec)^{-1} ||v|| signals spectrum proximity
  if (vnorm(r) > 1e8 * std::max(vnorm(v), 1e-30))
    throw std::domain_error("resolvent: z within ~1e-8 of the spectrum of A");
  return r;
}
}  // namespace

double F_of_z(const RankOneState& state, const Mat& a, double z) {
  const EpsForm& form = state.form;
  Vec rx = resolvent_apply(a, z, state.x);
  Vec ry = resolvent_apply(a, z, state.y);
  double rxx = eps_inner(rx, state.x, form);
  double ryy = eps_inner(ry, state.y, form);
  double rxy = eps_inner(rx, state.y, form);
  return rxx + rxx * ryy - rxy * rxy;
}

std::complex<double> F_of_z_complex(const RankOneState& state, const Mat& a,
                                    std::complex<double> z) {
  using C = std::complex<double>;
  std::size_t n = a.rows();
  std::vector<C> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = (i == j ? z : C(0)) - a(i, j);
  std::vector<C> xc(state.x.begin(), state.x.end());
  std::vector<C> yc(state.y.begin(), state.y.end());
  std::vector<C> rx = solve_complex(m, n, xc);
  std::vector<C> ry = solve_complex(m, n, yc);
  auto cinner = [&](const std::vector<C>& u, const std::vector<C>& v) {
    C s = u[0] * v[0];
    C t = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) t += u[i] * v[i];
    return s + static_cast<double>(state.form.eps) * t;
  };
  C rxx = cinner(rx, xc);
  C ryy = cinner(ry, yc);
  C rxy = cinner(rx, yc);
  return rxx + rxx * ryy - rxy * rxy;
}

ResidueSet residues_euclidean(const RankOneState& state, const Vec& alphas) {
  if (state.form.eps != 1)
    throw std::invalid_argument("residues_euclidean: requires eps = +1");
  if (alphas.size() != state.form.dim())
    throw std::invalid_argument("residues_euclidean: wrong number of eigenvalues");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = i + 1; j < alphas.size(); ++j)
      if (std::abs(alphas[i] - alphas[j]) < 1e-10)
        throw std::invalid_argument("residues_euclidean: repeated eigenvalues");

  const Vec& x = state.x;
  const Vec& y = state.y;
  ResidueSet rs;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    double f = x[k] * x[k];
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (j == k) continue;
      double w = x[j] * y[k] - x[k] * y[j];
      f += w * w / (alphas[k] - alphas[j]);
    }
    rs.alphas.emplace_back(alphas[k], 0.0);
    rs.values.emplace_back(f, 0.0);
  }
  return rs;
}

std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
hyperbolic_coords(const RankOneState& state) {
  if (state.form.eps != -1)
    throw std::invalid_argument("hyperbolic_coords: requires eps = -1");
  using C = std::complex<double>;
  const double isq2 = 1.0 / std::sqrt(2.0);
  auto lift = [&](const Vec& u) {
    std::vector<C> v(u.size());
    v[0] = C(u[0], u[1]) * isq2;
    v[1] = C(u[0], -u[1]) * isq2;
    for (std::size_t j = 2; j < u.size(); ++j) v[j] = C(0.0, u[j]);
    return v;
  };
  return {lift(state.x), lift(state.y)};
}

Mat hyperbolic_block_a(double alpha, const Vec& d, const EpsForm& form) {
  if (form.eps != -1) throw std::invalid_argument("hyperbolic_block_a: requires eps = -1");
  if (d.size() + 2 != form.dim())
    throw std::invalid_argument("hyperbolic_block_a: d must have n-1 entries");
  Mat a(form.dim(), form.dim());
  a(0, 1) = -alpha;
  a(1, 0) = alpha;
  for (std::size_t i = 0; i < d.size(); ++i) a(i + 2, i + 2) = d[i];
  return a;
}

ResidueSet residues_hyperbolic(const RankOneState& state, double alpha, const Vec& d) {
  using C = std::complex<double>;
  if (std::abs(alpha) < 1e-10)
    throw std::invalid_argument("residues_hyperbolic: alpha must be nonzero");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d[i]) < 1e-10)
      throw std::invalid_argument("residues_hyperbolic: zero eigenvalue in d");
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (std::abs(d[i] - d[j]) < 1e-10)
        throw std::invalid_argument("residues_hyperbolic: degenerate spectrum");
  }
  auto [v, w] = hyperbolic_coords(state);
  std::vector<C> alphas(state.form.dim());
  alphas[0] = C(0.0, alpha);
  alphas[1] = C(0.0, -alpha);
  for (std::size_t i = 0; i < d.size(); ++i) alphas[i + 2] = C(d[i], 0.0);

  ResidueSet rs;
  rs.alphas = alphas;
  rs.values.resize(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    C f = v[k] * v[k];
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (j == k) continue;
      C cross = v[j] * w[k] - v[k] * w[j];
      f += cross * cross / (alphas[k] - alphas[j]);
    }
    rs.values[k] = f;
  }
  if (std::abs(rs.values[1] - std::conj(rs.values[0])) > 1e-12 *
          std::max(1.0, std::abs(rs.values[0])))
    throw std::runtime_error("residues_hyperbolic: F_1 != conj(F_0)");
  return rs;
}

}  // namespace symflow
