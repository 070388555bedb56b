#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symflow/cartan.hpp"
#include "test_support.hpp"

using namespace symflow;
using namespace symflow::testing;

TEST_CASE("eps_inner basic values") {
  EpsForm plus{2, +1};
  EpsForm minus{2, -1};
  Vec e0 = {1, 0, 0};
  CHECK(eps_inner(e0, e0, plus) == doctest::Approx(1.0));

  Vec nullvec = {1, 1, 0};
  CHECK(eps_inner(nullvec, nullvec, minus) == doctest::Approx(0.0));

  Vec x = {2, 1, 0}, y = {1, 3, 0};
  CHECK(eps_inner(x, y, minus) == doctest::Approx(-1.0));

  Vec bad = {1, 0};
  CHECK_THROWS_AS(eps_inner(bad, e0, plus), std::invalid_argument);
}

TEST_CASE("decompose splits and reconstructs") {
  Rng rng(11);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    Mat m = random_matrix(rng, form.dim());
    CartanElement l = decompose(m, form);
    CHECK(max_diff(l.p + l.k, m) < 1e-14);
    CHECK(eps_symmetry_defect(l.p, form) < 1e-14);
    CHECK(eps_antisymmetry_defect(l.k, form) < 1e-14);

    // parts already split are recovered exactly
    CartanElement again = decompose(l.p, form);
    CHECK(max_diff(again.p, l.p) < 1e-15);
    CHECK(again.k.max_abs() < 1e-15);
  }
}

TEST_CASE("decompose trivial cases") {
  EpsForm form{2, -1};
  Rng rng(5);
  Mat sym = random_eps_symmetric(rng, form);
  CartanElement l = decompose(sym, form);
  CHECK(l.k.max_abs() < 1e-14);
  Mat anti = random_eps_antisymmetric(rng, form);
  l = decompose(anti, form);
  CHECK(l.p.max_abs() < 1e-14);
}

TEST_CASE("bracket Cartan relations") {
  Rng rng(23);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    Mat p1 = random_eps_symmetric(rng, form);
    Mat p2 = random_eps_symmetric(rng, form);
    Mat k1 = random_eps_antisymmetric(rng, form);
    Mat k2 = random_eps_antisymmetric(rng, form);

    CHECK(bracket(p1, p1).max_abs() < 1e-15);
    CHECK(eps_antisymmetry_defect(bracket(p1, p2), form) < 1e-13);  // [p,p] in k
    CHECK(eps_symmetry_defect(bracket(p1, k1), form) < 1e-13);      // [p,k] in p
    CHECK(eps_antisymmetry_defect(bracket(k1, k2), form) < 1e-13);  // [k,k] in k
  }
}

TEST_CASE("bracket of wedge generators closes") {
  EpsForm form{2, +1};
  Vec e0 = {1, 0, 0}, e1 = {0, 1, 0}, e2 = {0, 0, 1};
  Mat w01 = wedge_eps(e0, e1, form);
  Mat w12 = wedge_eps(e1, e2, form);
  Mat w02 = wedge_eps(e0, e2, form);
  // [e0^e1, e1^e2] = e0^e2 up to sign
  Mat b = bracket(w01, w12);
  double plus = max_diff(b, w02), minus = max_diff(b, -w02);
  CHECK(std::min(plus, minus) < 1e-14);
}

TEST_CASE("deformed bracket") {
  Rng rng(31);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    CartanElement l1 = random_cartan(rng, form);
    CartanElement l2 = random_cartan(rng, form);

    // s = 1 agrees with the plain bracket of the full elements
    CartanElement d1 = deformed_bracket(l1, l2, 1.0);
    CHECK(max_diff(d1.full(), bracket(l1.full(), l2.full())) < 1e-13);

    // s = 0: [p, p]_s = 0
    CartanElement p1{l1.p, Mat(form.dim(), form.dim())};
    CartanElement p2{l2.p, Mat(form.dim(), form.dim())};
    CartanElement d0 = deformed_bracket(p1, p2, 0.0);
    CHECK(d0.full().max_abs() < 1e-15);

    // s = 0: [k, p]_s is the plain bracket
    CartanElement k1{Mat(form.dim(), form.dim()), l1.k};
    CartanElement dkp = deformed_bracket(k1, p2, 0.0);
    CHECK(max_diff(dkp.full(), bracket(l1.k, l2.p)) < 1e-14);
  }
}

TEST_CASE("deformed bracket Jacobi identity at s in {0,1}") {
  Rng rng(37);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    for (double s : {0.0, 1.0}) {
      CartanElement a = random_cartan(rng, form);
      CartanElement b = random_cartan(rng, form);
      CartanElement c = random_cartan(rng, form);
      CartanElement cyc = deformed_bracket(a, deformed_bracket(b, c, s), s) +
                          deformed_bracket(b, deformed_bracket(c, a, s), s) +
                          deformed_bracket(c, deformed_bracket(a, b, s), s);
      CHECK(cyc.full().max_abs() < 1e-12);
    }
  }
}

TEST_CASE("trace form values and invariance") {
  EpsForm form{2, +1};
  Vec e1 = {0, 1, 0}, e2 = {0, 0, 1};
  Mat w = wedge_eps(e1, e2, form);
  CHECK(trace_form(w, w) == doctest::Approx(1.0));

  Rng rng(41);
  Mat lp = random_eps_symmetric(rng, form);
  double t = lp.trace() / 3.0;
  for (int i = 0; i < 3; ++i) lp(i, i) -= t;
  CHECK(std::abs(trace_form(Mat::identity(3), lp)) < 1e-14);

  // <A,[B,C]> = <[A,B],C>
  for (int trial = 0; trial < 5; ++trial) {
    Mat a = random_matrix(rng, 4), b = random_matrix(rng, 4), c = random_matrix(rng, 4);
    double lhs = trace_form(a, bracket(b, c));
    double rhs = trace_form(bracket(a, b), c);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("wedge_eps action identity and antisymmetry") {
  Rng rng(43);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    Vec a = random_vec(rng, form.dim());
    Vec b = random_vec(rng, form.dim());
    Vec x = random_vec(rng, form.dim());

    CHECK(wedge_eps(a, a, form).max_abs() < 1e-15);

    Mat w = wedge_eps(a, b, form);
    Vec lhs = w * x;
    Vec rhs = vsub(vscale(eps_inner(b, x, form), a), vscale(eps_inner(a, x, form), b));
    CHECK(max_diff(lhs, rhs) < 1e-14);
    CHECK(eps_antisymmetry_defect(w, form) < 1e-14);
  }
}

TEST_CASE("tensor_eps properties") {
  Rng rng(47);
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};

    Vec e0(form.dim(), 0.0);
    e0[0] = 1.0;
    Mat t0 = tensor_eps(e0, form);
    CHECK(t0(0, 0) == doctest::Approx(1.0));
    CHECK(t0.max_abs() == doctest::Approx(1.0));
    double off = 0.0;
    for (std::size_t i = 0; i < form.dim(); ++i)
      for (std::size_t j = 0; j < form.dim(); ++j)
        if (i != 0 || j != 0) off = std::max(off, std::abs(t0(i, j)));
    CHECK(off == 0.0);

    Vec x = random_vec(rng, form.dim());
    Mat t = tensor_eps(x, form);
    CHECK(t.trace() == doctest::Approx(eps_norm_sq(x, form)));
    CHECK(eps_symmetry_defect(t, form) < 1e-14);

    Vec u = random_vec(rng, form.dim());
    Vec lhs = t * u;
    Vec rhs = vscale(eps_inner(x, u, form), x);
    CHECK(max_diff(lhs, rhs) < 1e-13);
  }
}

TEST_CASE("space form generator shape") {
  for (int eps : {+1, -1}) {
    EpsForm form{3, eps};
    Mat e1 = space_form_e1(form);
    CHECK(e1(1, 0) == doctest::Approx(1.0));
    CHECK(e1(0, 1) == doctest::Approx(-double(eps)));
    CHECK(eps_antisymmetry_defect(e1, form) < 1e-15);
    // positive norm convention on the space-form Cartan space
    CHECK(double(eps) * trace_form(e1, e1) == doctest::Approx(1.0));
  }
}
