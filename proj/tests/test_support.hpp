#pragma once

#include <functional>

#include "symflow/cartan.hpp"
#include "symflow/linalg.hpp"

namespace symflow::testing {

inline Mat random_matrix(Rng& rng, std::size_t n, double scale = 1.0) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = scale * rng.sym();
  return m;
}

inline Vec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  Vec v(n);
  for (double& x : v) x = scale * rng.sym();
  return v;
}

inline Mat random_eps_symmetric(Rng& rng, const EpsForm& form, double scale = 1.0) {
  return decompose(random_matrix(rng, form.dim(), scale), form).p;
}

inline Mat random_eps_antisymmetric(Rng& rng, const EpsForm& form, double scale = 1.0) {
  return decompose(random_matrix(rng, form.dim(), scale), form).k;
}

inline CartanElement random_cartan(Rng& rng, const EpsForm& form, double scale = 1.0) {
  return decompose(random_matrix(rng, form.dim(), scale), form);
}

/// Unit vector for the eps-form: for eps = -1 lands on the x0 > 0 sheet.
inline Vec random_eps_unit(Rng& rng, const EpsForm& form, double radius = 1.0) {
  for (;;) {
    Vec x = random_vec(rng, form.dim());
    if (form.eps == -1) {
      // pick spatial part first, then solve for x0 on the upper sheet
      x[0] = 0.0;
      double s = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
      x[0] = std::sqrt(radius * radius + s);
      return x;
    }
    double n2 = eps_norm_sq(x, form);
    if (n2 > 1e-4) {
      double f = radius / std::sqrt(n2);
      for (double& c : x) c *= f;
      return x;
    }
  }
}

/// y orthogonal to x in the eps-form, scaled to the requested Euclidean size.
inline Vec random_eps_orthogonal(Rng& rng, const Vec& x, const EpsForm& form,
                                 double scale = 1.0) {
  for (;;) {
    Vec y = random_vec(rng, form.dim(), scale);
    double n2 = eps_norm_sq(x, form);
    double c = eps_inner(x, y, form) / n2;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * x[i];
    if (vnorm(y) > 1e-3) return y;
  }
}

/// Max |f_i - g_i| over matrix entries.
inline double max_diff(const Mat& a, const Mat& b) { return (a - b).max_abs(); }

inline double max_diff(const Vec& a, const Vec& b) { return vmax_abs(vsub(a, b)); }

}  // namespace symflow::testing
