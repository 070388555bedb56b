#pragma once

#include "symflow/linalg.hpp"

namespace symflow {

/// The bilinear form (x,y) = x0*y0 + eps * sum_{i>=1} x_i*y_i on R^{n+1}.
/// eps = +1 is Euclidean, eps = -1 has signature (1, n).
struct EpsForm {
  std::size_t n = 0;  // vectors live in R^{n+1}
  int eps = 1;

  std::size_t dim() const { return n + 1; }
  /// The metric matrix J = diag(1, eps, ..., eps).
  Mat metric() const;
};

double eps_inner(const Vec& x, const Vec& y, const EpsForm& form);
double eps_norm_sq(const Vec& x, const EpsForm& form);

/// A Lie-algebra element split into its symmetric-part / antisymmetric-part
/// pair with respect to the relevant Cartan involution. For the matrix
/// algebras here, `p` is the eps-symmetric part and `k` the eps-antisymmetric
/// part; the space-form algebras reuse the same container with their own
/// block splitting.
struct CartanElement {
  Mat p;
  Mat k;

  CartanElement() = default;
  CartanElement(Mat p_, Mat k_) : p(std::move(p_)), k(std::move(k_)) {}

  Mat full() const { return p + k; }
  CartanElement operator+(const CartanElement& o) const { return {p + o.p, k + o.k}; }
  CartanElement operator-(const CartanElement& o) const { return {p - o.p, k - o.k}; }
  CartanElement operator*(double s) const { return {p * s, k * s}; }
};

/// Max-entry-scaled deviation from (Mx,y) = (x,My); 0 for exactly symmetric M.
double eps_symmetry_defect(const Mat& m, const EpsForm& form);
/// Same for (Mx,y) = -(x,My).
double eps_antisymmetry_defect(const Mat& m, const EpsForm& form);

bool is_eps_symmetric(const Mat& m, const EpsForm& form, double tol = 1e-12);
bool is_eps_antisymmetric(const Mat& m, const EpsForm& form, double tol = 1e-12);

/// Unique splitting M = Lp + Lk into eps-symmetric and eps-antisymmetric
/// parts: Lp = (M + J M^T J)/2 with J the metric.
CartanElement decompose(const Mat& m, const EpsForm& form);

/// Plain matrix commutator, with a shape check.
Mat bracket(const Mat& a, const Mat& b);

/// One-parameter family of brackets on p + k: the semidirect bracket at
/// s = 0 and the full bracket at s = 1,
///   [L1, L2]_s = [B1,A2] - [B2,A1] + [B1,B2] + s[A1,A2],
/// split into parts via [k,p] in p, [k,k] + [p,p] in k.
CartanElement deformed_bracket(const CartanElement& l1, const CartanElement& l2, double s);

/// <A,B> = -1/2 Tr(AB). Ad-invariant; positive definite on the antisymmetric
/// algebras used here, indefinite on p when eps = -1.
double trace_form(const Mat& a, const Mat& b);

/// (a wedge_eps b) x = (b,x)_eps a - (a,x)_eps b, i.e. a (Jb)^T - b (Ja)^T.
Mat wedge_eps(const Vec& a, const Vec& b, const EpsForm& form);

/// Rank-one eps-symmetric matrix (x (x) x)_eps = x (Jx)^T, acting as
/// u -> (x,u)_eps x. Trace equals ||x||_eps^2. No traceless normalization
/// here; callers subtract the trace part where needed.
Mat tensor_eps(const Vec& x, const EpsForm& form);

/// Space-form generator E1: the matrix with blocks e1 / -eps*e1^T,
///   E1[0][1] = -eps, E1[1][0] = 1,
/// the normal form of a unit drift element in the space-form Cartan space.
Mat space_form_e1(const EpsForm& form);

/// Embeds a vector a in R^n as the space-form p-element with blocks
/// a / -eps*a^T (first row/column of the (n+1) x (n+1) matrix).
Mat space_form_p(const Vec& a, const EpsForm& form);

/// Embeds w in so_{n} (given as an n x n matrix) as the k-block of the
/// space-form algebra (rows/columns 1..n).
Mat space_form_k(const Mat& w);

}  // namespace symflow
