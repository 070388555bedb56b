#include "symflow/spectral.hpp"

namespace symflow {

Mat spectral_matrix(const CartanElement& l, const AffineSystem& sys, double lambda) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("spectral_matrix: lambda not finite");
  return l.p - l.k * lambda + sys.A * (lambda * lambda - sys.s);
}

Mat lax_m(const CartanElement& l, const AffineSystem& sys, double lambda) {
  if (lambda == 0.0) throw std::invalid_argument("lax_m: lambda must be nonzero");
  return (l.p - sys.A * sys.s) * (1.0 / lambda);
}

std::vector<double> char_coeffs(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_coeffs: not square");
  std::size_t n = m.rows();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  // M_k = A (M_{k-1} + c_{k-1} I), c_k = -Tr(M_k)/k
  Mat mk = Mat::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk;
    double ck = -mk.trace() / static_cast<double>(k);
    c[k] = ck;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += ck;
  }
  return c;
}

const std::vector<double>& default_lambda_samples() {
  static const std::vector<double> samples = {0.3, 0.7, 1.3, 2.1};
  return samples;
}

SpectralSample sample_spectrum(const CartanElement& l, const AffineSystem& sys,
                               const std::vector<double>& lambdas) {
  SpectralSample out;
  out.lambdas = lambdas;
  out.coeffs.reserve(lambdas.size());
  for (double lam : lambdas) {
    if (lam == 0.0) throw std::invalid_argument("sample_spectrum: lambda must be nonzero");
    out.coeffs.push_back(char_coeffs(spectral_matrix(l, sys, lam)));
  }
  return out;
}

double k_a_projection_norm(const Mat& lk) {
  if (lk.rows() != lk.cols() || lk.rows() < 3)
    throw std::invalid_argument("k_a_projection_norm: matrix too small");
  double s = 0.0;
  for (std::size_t i = 2; i < lk.rows(); ++i)
    for (std::size_t j = 2; j < lk.cols(); ++j) s += lk(i, j) * lk(i, j);
  return std::sqrt(s);
}

SpaceFormQuartic space_form_quartic(const CartanElement& l, const AffineSystem& sys,
                                    double lambda) {
  double proj = k_a_projection_norm(l.k);
  if (proj > 1e-10 * std::max(1.0, l.k.max_abs()))
    throw std::invalid_argument(
        "space_form_quartic: Lk has a nonzero component in the A-centralizer");
  double h = affine_hamiltonian(l, sys);
  double lam2s = lambda * lambda - sys.s;
  double kk = trace_form(l.k, l.k);
  double pp = trace_form(l.p, l.p);
  Mat comm = bracket(l.k, l.p);
  double cc = trace_form(comm, comm);
  SpaceFormQuartic q;
  q.c1 = sys.form.eps * lam2s * lam2s + 2.0 * lam2s * h + sys.s * kk + pp;
  q.c2 = lambda * lambda * (kk * pp - cc);
  return q;
}

namespace {
Vec grad_x(const PhaseFn& f, const Vec& x, const Vec& y, double h) {
  Vec g(x.size());
  Vec xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double x0 = xp[i];
    xp[i] = x0 + h;
    double fp = f(xp, y);
    xp[i] = x0 - h;
    double fm = f(xp, y);
    xp[i] = x0;
    g[i] = (fp - fm) / (2.0 * h);
    if (!std::isfinite(g[i]))
      throw std::runtime_error("poisson_bracket_canonical: non-finite partial");
  }
  return g;
}

Vec grad_y(const PhaseFn& f, const Vec& x, const Vec& y, double h) {
  Vec g(y.size());
  Vec yp = y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double y0 = yp[i];
    yp[i] = y0 + h;
    double fp = f(x, yp);
    yp[i] = y0 - h;
    double fm = f(x, yp);
    yp[i] = y0;
    g[i] = (fp - fm) / (2.0 * h);
    if (!std::isfinite(g[i]))
      throw std::runtime_error("poisson_bracket_canonical: non-finite partial");
  }
  return g;
}
}  // namespace

double poisson_bracket_canonical(const PhaseFn& f, const PhaseFn& g, const Vec& x,
                                 const Vec& y, const EpsForm& form, double h) {
  Vec fx = grad_x(f, x, y, h), fy = grad_y(f, x, y, h);
  Vec gx = grad_x(g, x, y, h), gy = grad_y(g, x, y, h);
  return eps_inner(fx, gy, form) - eps_inner(gx, fy, form);
}

}  // namespace symflow
