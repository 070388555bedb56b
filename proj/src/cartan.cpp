#include "symflow/cartan.hpp"

namespace symflow {

Mat EpsForm::metric() const {
  Mat j = Mat::identity(dim());
  for (std::size_t i = 1; i < dim(); ++i) j(i, i) = static_cast<double>(eps);
  return j;
}

double eps_inner(const Vec& x, const Vec& y, const EpsForm& form) {
  if (x.size() != form.dim() || y.size() != form.dim())
    throw std::invalid_argument("eps_inner: dimension mismatch");
  double s = x[0] * y[0];
  double t = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) t += x[i] * y[i];
  return s + form.eps * t;
}

double eps_norm_sq(const Vec& x, const EpsForm& form) { return eps_inner(x, x, form); }

namespace {
// J M with J = diag(1, eps, ..., eps): scales rows 1..n by eps.
Mat metric_times(const Mat& m, int eps) {
  Mat r = m;
  for (std::size_t i = 1; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) *= eps;
  return r;
}
}  // namespace

double eps_symmetry_defect(const Mat& m, const EpsForm& form) {
  if (m.rows() != form.dim() || m.cols() != form.dim())
    throw std::invalid_argument("eps_symmetry_defect: dimension mismatch");
  Mat jm = metric_times(m, form.eps);
  Mat d = jm - jm.transposed();
  double scale = std::max(1.0, m.max_abs());
  return d.max_abs() / scale;
}

double eps_antisymmetry_defect(const Mat& m, const EpsForm& form) {
  if (m.rows() != form.dim() || m.cols() != form.dim())
    throw std::invalid_argument("eps_antisymmetry_defect: dimension mismatch");
  Mat jm = metric_times(m, form.eps);
  Mat d = jm + jm.transposed();
  double scale = std::max(1.0, m.max_abs());
  return d.max_abs() / scale;
}

bool is_eps_symmetric(const Mat& m, const EpsForm& form, double tol) {
  return eps_symmetry_defect(m, form) <= tol;
}

bool is_eps_antisymmetric(const Mat& m, const EpsForm& form, double tol) {
  return eps_antisymmetry_defect(m, form) <= tol;
}

CartanElement decompose(const Mat& m, const EpsForm& form) {
  if (m.rows() != form.dim() || m.cols() != form.dim())
    throw std::invalid_argument("decompose: dimension mismatch");
  // Lp = (M + J M^T J)/2 is eps-symmetric, Lk the complement.
  Mat j = form.metric();
  Mat sigma = j * m.transposed() * j;
  Mat lp = (m + sigma) * 0.5;
  Mat lk = (m - sigma) * 0.5;
  return {lp, lk};
}

Mat bracket(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("bracket: dimension mismatch");
  return commutator(a, b);
}

CartanElement deformed_bracket(const CartanElement& l1, const CartanElement& l2, double s) {
  Mat p_part = bracket(l1.k, l2.p) - bracket(l2.k, l1.p);
  Mat k_part = bracket(l1.k, l2.k) + s * bracket(l1.p, l2.p);
  return {p_part, k_part};
}

double trace_form(const Mat& a, const Mat& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows())
    throw std::invalid_argument("trace_form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * b(j, i);
  return -0.5 * s;
}

Mat wedge_eps(const Vec& a, const Vec& b, const EpsForm& form) {
  if (a.size() != form.dim() || b.size() != form.dim())
    throw std::invalid_argument("wedge_eps: dimension mismatch");
  std::size_t d = form.dim();
  Mat m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double w = j == 0 ? 1.0 : static_cast<double>(form.eps);
      m(i, j) = w * (a[i] * b[j] - b[i] * a[j]);
    }
  return m;
}

Mat tensor_eps(const Vec& x, const EpsForm& form) {
  if (x.size() != form.dim()) throw std::invalid_argument("tensor_eps: dimension mismatch");
  std::size_t d = form.dim();
  Mat m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double w = j == 0 ? 1.0 : static_cast<double>(form.eps);
      m(i, j) = x[i] * w * x[j];
    }
  return m;
}

Mat space_form_e1(const EpsForm& form) {
  Vec e1(form.n, 0.0);
  e1[0] = 1.0;
  return space_form_p(e1, form);
}

Mat space_form_p(const Vec& a, const EpsForm& form) {
  if (a.size() != form.n) throw std::invalid_argument("space_form_p: expected vector in R^n");
  std::size_t d = form.dim();
  Mat m(d, d);
  for (std::size_t i = 0; i < form.n; ++i) {
    m(i + 1, 0) = a[i];
    m(0, i + 1) = -static_cast<double>(form.eps) * a[i];
  }
  return m;
}

Mat space_form_k(const Mat& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("space_form_k: not square");
  std::size_t n = w.rows();
  Mat m(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i + 1, j + 1) = w(i, j);
  return m;
}

}  // namespace symflow
