#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symflow/elastica.hpp"
#include "symflow/neumann.hpp"
#include "symflow/spectral.hpp"
#include "test_support.hpp"

using namespace symflow;
using namespace symflow::testing;

TEST_CASE("spectral matrix trivial cases") {
  EpsForm form{2, +1};
  Rng rng(3);
  Mat a = random_eps_symmetric(rng, form);
  CartanElement l = random_cartan(rng, form);

  CHECK(max_diff(spectral_matrix(l, {a, 0.0, form}, 0.0), l.p) < 1e-15);
  CHECK(max_diff(spectral_matrix(l, {a, 1.0, form}, 1.0), l.p - l.k) < 1e-15);
}

TEST_CASE("char_coeffs known values") {
  Mat z(3, 3);
  std::vector<double> c = char_coeffs(z);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == 0.0);
  CHECK(c[3] == 0.0);

  Mat d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  c = char_coeffs(d);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(-3.0));
  CHECK(c[2] == doctest::Approx(2.0));
}

TEST_CASE("char_coeffs against a determinant-sampling oracle") {
  // det(zI - M) sampled at 5 points, coefficients recovered through a
  // Vandermonde solve
  Rng rng(7);
  Mat m = random_matrix(rng, 4);
  std::vector<double> c = char_coeffs(m);

  Vec zs = {-2.0, -0.5, 0.5, 1.5, 2.5};
  Mat vand(5, 5);
  Vec rhs(5);
  for (std::size_t i = 0; i < 5; ++i) {
    Mat zi = Mat::identity(4) * zs[i] - m;
    rhs[i] = determinant(zi);
    for (std::size_t j = 0; j < 5; ++j) vand(i, j) = std::pow(zs[i], 4.0 - j);
  }
  Vec sol = solve(vand, rhs);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(sol[j] - c[j]) < 1e-10);
}

TEST_CASE("sample_spectrum collects monic coefficient vectors") {
  EpsForm form{2, +1};
  Rng rng(9);
  Mat a = random_eps_symmetric(rng, form);
  AffineSystem sys{a, 1.0, form};
  CartanElement l = random_cartan(rng, form);

  SpectralSample sample = sample_spectrum(l, sys);
  REQUIRE(sample.lambdas.size() == 4);
  REQUIRE(sample.coeffs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(sample.coeffs[i].size() == form.dim() + 1);  // degree n+1, monic
    CHECK(sample.coeffs[i][0] == 1.0);
    std::vector<double> direct = char_coeffs(spectral_matrix(l, sys, sample.lambdas[i]));
    for (std::size_t k = 0; k < direct.size(); ++k)
      CHECK(sample.coeffs[i][k] == direct[k]);
  }
  CHECK_THROWS_AS(sample_spectrum(l, sys, {0.0}), std::invalid_argument);
}

TEST_CASE("characteristic coefficients conserved along extremal flow") {
  EpsForm form{2, +1};
  Rng rng(11);
  Mat a = random_eps_symmetric(rng, form, 0.6);
  AffineSystem sys{a, 1.0, form};
  CartanElement l0 = random_cartan(rng, form, 0.5);
  std::size_t d = form.dim();

  double lam = 0.7;
  std::vector<NamedInvariant> invs;
  for (std::size_t k = 1; k <= d; ++k)
    invs.push_back({"c" + std::to_string(k), [sys, d, lam, k](const Vec& v) {
                      return char_coeffs(spectral_matrix(unpack_cartan(v, d), sys, lam))[k];
                    }});
  Trajectory traj =
      integrate(extremal_flow(sys), pack_cartan(l0), 10.0, 1e-3, std::nullopt, invs);
  for (const DriftRow& row : drift_report(traj).rows) CHECK(row.max_rel_drift < 1e-9);
}

TEST_CASE("Lax form: dL_lambda/dt = [M_lambda, L_lambda]") {
  Rng rng(13);
  for (int eps : {+1, -1}) {
    for (double s : {0.0, 1.0}) {
      EpsForm form{2, eps};
      std::size_t d = form.dim();
      Mat a = random_eps_symmetric(rng, form, 0.5);
      AffineSystem sys{a, s, form};
      CartanElement l0 = random_cartan(rng, form, 0.5);

      double lam = 1.3, dt = 1e-5;
      Trajectory traj = integrate(extremal_flow(sys), pack_cartan(l0), 2.0 * dt, dt);
      REQUIRE(traj.size() == 3);
      CartanElement lm = unpack_cartan(traj.states[0], d);
      CartanElement lc = unpack_cartan(traj.states[1], d);
      CartanElement lp = unpack_cartan(traj.states[2], d);
      Mat dldt = (spectral_matrix(lp, sys, lam) - spectral_matrix(lm, sys, lam)) *
                 (1.0 / (2.0 * dt));
      Mat expected = bracket(lax_m(lc, sys, lam), spectral_matrix(lc, sys, lam));
      CHECK(max_diff(dldt, expected) < 1e-6);
    }
  }
}

TEST_CASE("space-form quartic matches the characteristic polynomial") {
  // L_lambda has rank <= 4 in the space-form configuration, so its
  // characteristic polynomial is z^{n-3} (z^4 + c1 z^2 + c2)
  Rng rng(17);
  for (int eps : {+1, -1}) {
    for (double s : {0.0, 1.0}) {
      EpsForm form{4, eps};
      std::size_t d = form.dim();
      ElasticSystem esys = make_elastic_system(form, s);
      AffineSystem sys{esys.a, s, form};
      Vec rho = random_vec(rng, form.n, 0.7);
      Vec l = random_vec(rng, form.n - 1, 0.7);
      CartanElement st = make_elastic_state(rho, l, form);

      for (double lam : default_lambda_samples()) {
        SpaceFormQuartic q = space_form_quartic(st, sys, lam);
        std::vector<double> c = char_coeffs(spectral_matrix(st, sys, lam));
        // monic degree-5 polynomial z(z^4 + c1 z^2 + c2) for n = 4
        CHECK(std::abs(c[1]) < 1e-10);
        CHECK(c[2] == doctest::Approx(q.c1).epsilon(1e-8));
        CHECK(std::abs(c[3]) < 1e-10);
        CHECK(c[4] == doctest::Approx(q.c2).epsilon(1e-8));
        CHECK(std::abs(c[5]) < 1e-10);
      }
    }
  }
}

TEST_CASE("space-form quartic trivial case and centralizer rejection") {
  EpsForm form{3, -1};
  ElasticSystem esys = make_elastic_system(form, 1.0);
  AffineSystem sys{esys.a, 1.0, form};
  std::size_t d = form.dim();

  CartanElement zero{Mat(d, d), Mat(d, d)};
  double lam = 0.7;
  SpaceFormQuartic q = space_form_quartic(zero, sys, lam);
  double lam2s = lam * lam - 1.0;
  CHECK(q.c1 == doctest::Approx(form.eps * lam2s * lam2s));
  CHECK(q.c2 == doctest::Approx(0.0));

  // Lk with a component in the so_{n-1} block is rejected
  Mat w(form.n, form.n);
  w(1, 2) = 1.0;
  w(2, 1) = -1.0;
  CartanElement bad{Mat(d, d), space_form_k(w)};
  CHECK_THROWS_AS(space_form_quartic(bad, sys, lam), std::invalid_argument);
}

TEST_CASE("I2 is conserved along the elastic flow") {
  Rng rng(23);
  EpsForm form{3, +1};
  ElasticSystem sys = make_elastic_system(form, 1.0);
  std::size_t d = form.dim();
  CartanElement st = make_elastic_state(random_vec(rng, 3, 0.6), random_vec(rng, 2, 0.6), form);

  std::vector<NamedInvariant> invs = {
      {"I2", [d](const Vec& v) { return elastic_i2(unpack_cartan(v, d)); }}};
  Trajectory traj = integrate(elastic_flow(sys), pack_cartan(st), 10.0, 1e-3, std::nullopt, invs);
  CHECK(drift_report(traj).max_rel("I2") < 1e-9);
}

TEST_CASE("poisson bracket basics") {
  EpsForm form{2, +1};
  Rng rng(29);
  Vec x = random_vec(rng, 3), y = random_vec(rng, 3);

  PhaseFn f = [](const Vec& xx, const Vec& yy) { return xx[1] * yy[2] + xx[0] * xx[0]; };
  CHECK(std::abs(poisson_bracket_canonical(f, f, x, y, form)) < 1e-9);

  PhaseFn xi = [](const Vec& xx, const Vec&) { return xx[1]; };
  PhaseFn yi = [](const Vec&, const Vec& yy) { return yy[1]; };
  CHECK(poisson_bracket_canonical(xi, yi, x, y, form) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Neumann residues are in involution") {
  EpsForm form{3, +1};
  Rng rng(31);
  Vec alphas = {0.3, 0.9, 1.7, 2.4};
  Vec x = random_eps_unit(rng, form);
  Vec y = random_eps_orthogonal(rng, x, form);

  auto residue = [&](std::size_t k) {
    return PhaseFn([alphas, form, k](const Vec& xx, const Vec& yy) {
      RankOneState st{xx, yy, form, 1.0};
      // constraints are not needed to evaluate the polynomial formula
      double f = xx[k] * xx[k];
      for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (j == k) continue;
        double w = xx[j] * yy[k] - xx[k] * yy[j];
        f += w * w / (alphas[k] - alphas[j]);
      }
      (void)st;
      return f;
    });
  };
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      double pb = poisson_bracket_canonical(residue(i), residue(j), x, y, form);
      CHECK(std::abs(pb) < 1e-6);
    }
}
