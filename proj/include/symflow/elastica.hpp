#pragma once

#include <utility>

#include "symflow/affine.hpp"
#include "symflow/cartan.hpp"
#include "symflow/integrator.hpp"

namespace symflow {

/// Space-form elastic data: the drift is the unit generator E1 and the
/// k-part of the state is confined to the orthogonal complement of its
/// centralizer (the wedge block of e1 with span e2..en).
struct ElasticSystem {
  EpsForm form;
  double s = 1.0;
  Mat a;  // E1
};

ElasticSystem make_elastic_system(const EpsForm& form, double s);

/// Builds the state matrices from coordinates: rho in R^n parametrizes the
/// space-form p-part, l in R^{n-1} the wedge block e1 ^ (0, l).
CartanElement make_elastic_state(const Vec& rho, const Vec& l, const EpsForm& form);

Vec elastic_rho(const CartanElement& state, const EpsForm& form);
Vec elastic_l(const CartanElement& state, const EpsForm& form);

/// Geodesic-curvature square of the projected curve: the norm square of
/// [U, A] in the space-form metric (the positive norm on the Cartan space,
/// i.e. eps * <[U,A],[U,A]>). Equals <U,U> for U in the wedge block.
double curvature_sq(const Mat& u, const Mat& a, const EpsForm& form);

/// dLp/dt = [Lperp, Lp] + s [A, Lperp],  dLperp/dt = [A, Lp].
/// Coincides with the extremal field of the affine system at drift E1.
CartanElement elastic_rhs(const CartanElement& state, const ElasticSystem& sys);

StateFn elastic_flow(const ElasticSystem& sys);

double elastic_hamiltonian(const CartanElement& state, const ElasticSystem& sys);
/// I1 = s <Lperp,Lperp> + <Lp,Lp> (trace form).
double elastic_casimir_i1(const CartanElement& state, const ElasticSystem& sys);
/// I2 = <Lperp,Lperp><Lp,Lp> - <[Lperp,Lp],[Lperp,Lp]> (trace form).
double elastic_i2(const CartanElement& state);

/// (dxi/dt)^2 - (-xi^3 + 4(H - curv) xi^2 + 4(I1 - H^2) xi + 4 I2);
/// vanishes along elastic flow with xi = kappa^2 when called with
/// curv = eps*s, I1 -> eps*I1, I2 -> -eps*I2 (trace-form invariants).
double kappa_cubic_residual(double xi, double dxi_dt, double h, double curv, double i1,
                            double i2);

/// Cubic arguments that make the residual vanish for a given system.
struct CubicParams {
  double h = 0.0;
  double curv = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
};
CubicParams cubic_params(const CartanElement& state, const ElasticSystem& sys);

/// Torsion of the projected curve for n = 3, by finite differences of the
/// rotation angle of the normal direction l(t) in the e2-e3 plane.
Vec torsion_series(const std::vector<Vec>& l_samples, double dt);

struct FrenetFrame {
  Vec t;
  Vec n;
  Vec b;
  double kappa = 0.0;
  double tau = 0.0;
};

/// dT = kappa N, dN = -kappa T + tau B, dB = -tau N. The printed variant
/// replaces the last equation by dB = -kappa N and is exposed for
/// comparison only.
FrenetFrame frenet_rhs(const FrenetFrame& frame, bool printed_binormal_variant = false);

StateFn frenet_flow(double kappa, double tau, std::size_t dim,
                    bool printed_binormal_variant = false);
/// Gram-Schmidt re-orthonormalization of the packed (T, N, B) state.
Vec frenet_project(const Vec& state, std::size_t dim);
Vec pack_frenet(const FrenetFrame& frame);
FrenetFrame unpack_frenet(const Vec& state, std::size_t dim, double kappa, double tau);

/// Pendulum on S^{n-1}: dR/dt = R Q1, dQ/dt = [Q1, Q] - (R^T e1) ^ e1,
/// with Q1 the wedge-block part of Q. R must be orthogonal to ortho_tol
/// (the integration wrapper relaxes it for the slightly off-manifold
/// Runge-Kutta stage points).
std::pair<Mat, Mat> pendulum_rhs(const Mat& r, const Mat& q, double ortho_tol = 1e-8);

/// Wedge-block (first row/column) part of an so_n matrix.
Mat so_wedge_part(const Mat& q);
/// Complementary so_{n-1} block.
Mat so_centralizer_part(const Mat& q);

double pendulum_hamiltonian(const Mat& r, const Mat& q);

StateFn pendulum_flow(std::size_t n);
/// Re-orthonormalizes the R factor of the packed (R, Q) state.
Vec pendulum_project(const Vec& state, std::size_t n);
Vec pack_pendulum(const Mat& r, const Mat& q);
std::pair<Mat, Mat> unpack_pendulum(const Vec& state, std::size_t n);

/// Lie-algebra form of the pendulum in the Euclidean semidirect algebra:
///   dP = [P, Q1~], dQ1~ = [E1, P],
/// with P the p-embedding of p = -R^T e1 and Q1~ the k-embedding of Q1.
/// Solutions map onto elastic_rhs solutions (s = 0, eps = +1, A = E1)
/// under (Lp, Lperp) = (-P, -Q1~).
std::pair<Mat, Mat> pendulum_embedding_rhs(const Mat& p_mat, const Mat& q1_mat,
                                           const EpsForm& form);

}  // namespace symflow
