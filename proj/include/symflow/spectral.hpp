#pragma once

#include "symflow/affine.hpp"
#include "symflow/cartan.hpp"

namespace symflow {

/// L_lambda = Lp - lambda*Lk + (lambda^2 - s)*A.
Mat spectral_matrix(const CartanElement& l, const AffineSystem& sys, double lambda);

/// M_lambda = (1/lambda)(Lp - s*A); dL_lambda/dt = [M_lambda, L_lambda]
/// holds exactly along the extremal flow.
Mat lax_m(const CartanElement& l, const AffineSystem& sys, double lambda);

/// Monic characteristic polynomial coefficients, highest degree first,
/// via the Faddeev-LeVerrier trace recurrence. Length rows()+1.
std::vector<double> char_coeffs(const Mat& m);

/// Default sample set for spectral invariants; avoids 0 and +-1 where the
/// lambda-terms degenerate.
const std::vector<double>& default_lambda_samples();

/// Characteristic coefficients of L_lambda at a set of sample values; each
/// coefficient vector is monic of length n+2. All entries are first
/// integrals of the extremal flow.
struct SpectralSample {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> coeffs;  // aligned with lambdas
};

SpectralSample sample_spectrum(const CartanElement& l, const AffineSystem& sys,
                               const std::vector<double>& lambdas = default_lambda_samples());

struct SpaceFormQuartic {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Coefficients of the quartic xi^4 + c1 xi^2 + c2 satisfied by the nonzero
/// eigenvalues of L_lambda restricted to its range, for space-form data
/// (A the unit generator, Lk in the orthogonal complement of the
/// A-centralizer). Cross-checked against char_coeffs in the tests:
///   c1 = eps (l^2-s)^2 + 2 (l^2-s) H + s<Lk,Lk> + <Lp,Lp>,
///   c2 = l^2 (<Lk,Lk><Lp,Lp> - <[Lk,Lp],[Lk,Lp]>).
/// Rejects Lk with a nonzero projection onto the A-centralizer.
SpaceFormQuartic space_form_quartic(const CartanElement& l, const AffineSystem& sys,
                                    double lambda);

/// Norm of the sub-block of Lk lying in the centralizer of the space-form
/// generator E1 (rows/columns 2..n).
double k_a_projection_norm(const Mat& lk);

using PhaseFn = std::function<double(const Vec& x, const Vec& y)>;

/// Central-difference evaluation of
///   {f,g} = (df/dx, dg/dy)_eps - (dg/dx, df/dy)_eps
/// with step h componentwise.
double poisson_bracket_canonical(const PhaseFn& f, const PhaseFn& g, const Vec& x,
                                 const Vec& y, const EpsForm& form, double h = 1e-5);

}  // namespace symflow
