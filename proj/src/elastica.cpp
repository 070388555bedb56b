#include "symflow/elastica.hpp"

#include <algorithm>

#include "symflow/spectral.hpp"

namespace symflow {

ElasticSystem make_elastic_system(const EpsForm& form, double s) {
  if (form.n < 2) throw std::invalid_argument("elastic system needs n >= 2");
  return {form, s, space_form_e1(form)};
}

CartanElement make_elastic_state(const Vec& rho, const Vec& l, const EpsForm& form) {
  if (rho.size() != form.n || l.size() + 1 != form.n)
    throw std::invalid_argument("make_elastic_state: rho in R^n, l in R^{n-1}");
  Mat lp = space_form_p(rho, form);
  // wedge block w = (0,l) ^ e1 inside so_n
  Mat w(form.n, form.n);
  for (std::size_t i = 0; i < l.size(); ++i) {
    w(i + 1, 0) = l[i];
    w(0, i + 1) = -l[i];
  }
  return {lp, space_form_k(w)};
}

Vec elastic_rho(const CartanElement& state, const EpsForm& form) {
  Vec rho(form.n);
  for (std::size_t i = 0; i < form.n; ++i) rho[i] = state.p(i + 1, 0);
  return rho;
}

Vec elastic_l(const CartanElement& state, const EpsForm& form) {
  Vec l(form.n - 1);
  for (std::size_t i = 0; i + 1 < form.n; ++i) l[i] = state.k(i + 2, 1);
  return l;
}

double curvature_sq(const Mat& u, const Mat& a, const EpsForm& form) {
  Mat c = bracket(u, a);
  return static_cast<double>(form.eps) * trace_form(c, c);
}

CartanElement elastic_rhs(const CartanElement& state, const ElasticSystem& sys) {
  double proj = k_a_projection_norm(state.k);
  if (proj > 1e-12 * std::max(1.0, state.k.max_abs()))
    throw std::invalid_argument("elastic_rhs: Lk has a component in the A-centralizer");
  Mat dp = bracket(state.k, state.p) + sys.s * bracket(sys.a, state.k);
  Mat dk = bracket(sys.a, state.p);
  return {dp, dk};
}

StateFn elastic_flow(const ElasticSystem& sys) {
  std::size_t dim = sys.form.dim();
  return [sys, dim](const Vec& state) {
    CartanElement l = unpack_cartan(state, dim);
    return pack_cartan(elastic_rhs(l, sys));
  };
}

double elastic_hamiltonian(const CartanElement& state, const ElasticSystem& sys) {
  return 0.5 * trace_form(state.k, state.k) + trace_form(sys.a, state.p);
}

double elastic_casimir_i1(const CartanElement& state, const ElasticSystem& sys) {
  return sys.s * trace_form(state.k, state.k) + trace_form(state.p, state.p);
}

double elastic_i2(const CartanElement& state) {
  Mat c = bracket(state.k, state.p);
  return trace_form(state.k, state.k) * trace_form(state.p, state.p) - trace_form(c, c);
}

double kappa_cubic_residual(double xi, double dxi_dt, double h, double curv, double i1,
                            double i2) {
  double cubic = -xi * xi * xi + 4.0 * (h - curv) * xi * xi + 4.0 * (i1 - h * h) * xi +
                 4.0 * i2;
  return dxi_dt * dxi_dt - cubic;
}

CubicParams cubic_params(const CartanElement& state, const ElasticSystem& sys) {
  double eps = sys.form.eps;
  CubicParams p;
  p.h = elastic_hamiltonian(state, sys);
  p.curv = eps * sys.s;
  p.i1 = eps * elastic_casimir_i1(state, sys);
  p.i2 = -eps * elastic_i2(state);
  return p;
}

Vec torsion_series(const std::vector<Vec>& l_samples, double dt) {
  if (l_samples.size() < 3) throw std::invalid_argument("torsion_series: too few samples");
  if (l_samples.front().size() != 2)
    throw std::invalid_argument("torsion_series: torsion extraction implemented for n = 3");
  std::vector<double> theta(l_samples.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < l_samples.size(); ++i) {
    double raw = std::atan2(l_samples[i][1], l_samples[i][0]);
    if (i > 0) {
      double prev = theta[i - 1];
      double cand = raw + offset;
      while (cand - prev > M_PI) { offset -= 2.0 * M_PI; cand = raw + offset; }
      while (prev - cand > M_PI) { offset += 2.0 * M_PI; cand = raw + offset; }
    }
    theta[i] = raw + offset;
  }
  Vec tau(l_samples.size() - 2);
  for (std::size_t i = 1; i + 1 < l_samples.size(); ++i)
    tau[i - 1] = (theta[i + 1] - theta[i - 1]) / (2.0 * dt);
  return tau;
}

FrenetFrame frenet_rhs(const FrenetFrame& frame, bool printed_binormal_variant) {
  FrenetFrame d;
  d.kappa = frame.kappa;
  d.tau = frame.tau;
  d.t = vscale(frame.kappa, frame.n);
  d.n = vadd(vscale(-frame.kappa, frame.t), vscale(frame.tau, frame.b));
  d.b = vscale(printed_binormal_variant ? -frame.kappa : -frame.tau, frame.n);
  return d;
}

Vec pack_frenet(const FrenetFrame& frame) { return vcat(vcat(frame.t, frame.n), frame.b); }

FrenetFrame unpack_frenet(const Vec& state, std::size_t dim, double kappa, double tau) {
  if (state.size() != 3 * dim) throw std::invalid_argument("unpack_frenet: size mismatch");
  FrenetFrame f;
  f.t = Vec(state.begin(), state.begin() + dim);
  f.n = Vec(state.begin() + dim, state.begin() + 2 * dim);
  f.b = Vec(state.begin() + 2 * dim, state.end());
  f.kappa = kappa;
  f.tau = tau;
  return f;
}

StateFn frenet_flow(double kappa, double tau, std::size_t dim, bool printed_binormal_variant) {
  return [=](const Vec& state) {
    FrenetFrame f = unpack_frenet(state, dim, kappa, tau);
    return pack_frenet(frenet_rhs(f, printed_binormal_variant));
  };
}

Vec frenet_project(const Vec& state, std::size_t dim) {
  FrenetFrame f = unpack_frenet(state, dim, 0, 0);
  auto normalize = [](Vec& v) {
    double n = vnorm(v);
    for (double& c : v) c /= n;
  };
  normalize(f.t);
  double c = vdot(f.n, f.t);
  for (std::size_t i = 0; i < dim; ++i) f.n[i] -= c * f.t[i];
  normalize(f.n);
  double c1 = vdot(f.b, f.t), c2 = vdot(f.b, f.n);
  for (std::size_t i = 0; i < dim; ++i) f.b[i] -= c1 * f.t[i] + c2 * f.n[i];
  normalize(f.b);
  return pack_frenet(f);
}

Mat so_wedge_part(const Mat& q) {
  Mat w(q.rows(), q.cols());
  for (std::size_t i = 1; i < q.rows(); ++i) {
    w(i, 0) = q(i, 0);
    w(0, i) = q(0, i);
  }
  return w;
}

Mat so_centralizer_part(const Mat& q) {
  Mat w(q.rows(), q.cols());
  for (std::size_t i = 1; i < q.rows(); ++i)
    for (std::size_t j = 1; j < q.cols(); ++j) w(i, j) = q(i, j);
  return w;
}

std::pair<Mat, Mat> pendulum_rhs(const Mat& r, const Mat& q, double ortho_tol) {
  std::size_t n = r.rows();
  Mat defect = r.transposed() * r - Mat::identity(n);
  if (defect.max_abs() > ortho_tol)
    throw std::domain_error("pendulum_rhs: R lost orthogonality beyond tolerance");
  Mat q1 = so_wedge_part(q);
  Mat dr = r * q1;
  Vec rte1(n);
  for (std::size_t i = 0; i < n; ++i) rte1[i] = r(0, i);  // R^T e1
  Mat grav(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    // (R^T e1) ^ e1
    grav(i, 0) += rte1[i];
    grav(0, i) -= rte1[i];
  }
  grav(0, 0) = 0.0;
  Mat dq = bracket(q1, q) - grav;
  return {dr, dq};
}

double pendulum_hamiltonian(const Mat& r, const Mat& q) {
  Mat q1 = so_wedge_part(q);
  return 0.5 * trace_form(q1, q1) + (r(0, 0) + 1.0);
}

Vec pack_pendulum(const Mat& r, const Mat& q) {
  return vcat(mat_to_vec(r), mat_to_vec(q));
}

std::pair<Mat, Mat> unpack_pendulum(const Vec& state, std::size_t n) {
  std::size_t sz = n * n;
  if (state.size() != 2 * sz) throw std::invalid_argument("unpack_pendulum: size mismatch");
  Vec vr(state.begin(), state.begin() + sz);
  Vec vq(state.begin() + sz, state.end());
  return {vec_to_mat(vr, n, n), vec_to_mat(vq, n, n)};
}

StateFn pendulum_flow(std::size_t n) {
  return [n](const Vec& state) {
    auto [r, q] = unpack_pendulum(state, n);
    auto [dr, dq] = pendulum_rhs(r, q, 1e-4);
    return pack_pendulum(dr, dq);
  };
}

Vec pendulum_project(const Vec& state, std::size_t n) {
  auto [r, q] = unpack_pendulum(state, n);
  // Gram-Schmidt on columns keeps R in SO_n
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += r(i, j) * r(i, k);
      for (std::size_t i = 0; i < n; ++i) r(i, j) -= c * r(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += r(i, j) * r(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) r(i, j) /= norm;
  }
  // keep Q exactly antisymmetric against roundoff
  Mat qa = (q - q.transposed()) * 0.5;
  return pack_pendulum(r, qa);
}

std::pair<Mat, Mat> pendulum_embedding_rhs(const Mat& p_mat, const Mat& q1_mat,
                                           const EpsForm& form) {
  Mat e1 = space_form_e1(form);
  Mat dp = bracket(p_mat, q1_mat);
  Mat dq1 = bracket(e1, p_mat);
  return {dp, dq1};
}

}  // namespace symflow
