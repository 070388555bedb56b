#pragma once

#include <utility>

#include "symflow/integrator.hpp"
#include "symflow/neumann.hpp"

namespace symflow {

/// Jacobi's separating coordinates on the unit sphere: u_1 < ... < u_n are
/// the zeros of sum_k x_k^2/(z - alpha_k), interlacing the alphas.
struct EllipticChart {
  Vec alphas;                   // n+1 distinct, sorted ascending
  Vec u;                        // n roots, alphas[k] < u[k] < alphas[k+1]
  std::vector<int> signs;       // per-coordinate sign of x_k
  std::vector<bool> degenerate; // interval collapsed (some x_k = 0)

  bool any_degenerate() const {
    for (bool f : degenerate)
      if (f) return true;
    return false;
  }
};

/// A point of the cotangent bundle of the quadric (x, A^{-1}x)_eps = 1 with
/// (p, A^{-1}x)_eps = 0.
struct QuadricState {
  Vec x;
  Vec p;
  EpsForm form;
};

void validate_quadric(const QuadricState& state, const Mat& a, double tol = 1e-10);

/// Zeros of sum x_k^2/(z - alpha_k) by bisection on each interlacing
/// interval. Euclidean case only (eps = +1, ||x|| = 1).
EllipticChart elliptic_coords(const Vec& x, const Vec& alphas);

/// x_k = sign_k sqrt(m(alpha_k)/a'(alpha_k)); unit norm by construction.
Vec x_from_elliptic(const EllipticChart& chart);

/// Separated velocities du_k/dt = branch_k * 2 sqrt(-a(u_k) b(u_k)) / m'(u_k),
/// where b comes from the residue constants via sum c_k/(z-alpha_k) = b/a.
/// branch defaults to +1 for every coordinate.
Vec separated_rhs(const EllipticChart& chart, const Vec& c,
                  const std::vector<int>& branch = {});

/// The exact coordinate velocities of a phase point with dx/dt = y:
/// du_k/dt = -2 a(u_k) (R_{u_k} x, y) / m'(u_k), with the diagonal resolvent.
Vec separated_velocity_from_state(const EllipticChart& chart, const Vec& x, const Vec& y);

/// (R_{u_k} x, y) for the diagonal drift; the sign of these values selects
/// the branch of the separated equations.
Vec resolvent_pairings(const EllipticChart& chart, const Vec& x, const Vec& y);

struct EllipticFrame {
  std::vector<Vec> vectors;  // dx/du_k = 1/2 (u_k I - A)^{-1} x
  Vec norm_sq;               // ||dx/du_k||^2 = -m'(u_k)/(4 a(u_k))
};

EllipticFrame frame_norms(const EllipticChart& chart, const Vec& x);

struct NeumannSide {
  double lambda = 1.0;
  Vec u;
  Vec v;
};

/// The map (lambda, u, v) -> (x, p) from the Neumann manifold
/// N0 = {||u||_eps = 1, (u,v)_eps = 0, F0 = 0} to the quadric bundle:
///   x = Au/sqrt((Au,u)),  p = (lambda/sqrt((Au,u)))(Av - ((Au,v)/(Au,u))Au).
QuadricState knorrer_forward(double lambda, const Vec& u, const Vec& v, const Mat& a,
                             const EpsForm& form);

/// Inverse map: lambda = sqrt((A^{-1}p,p))/||A^{-1}x||, u = A^{-1}x/||A^{-1}x||,
/// v = (A^{-1}p - (u, A^{-1}p) u)/sqrt((A^{-1}p,p)).
NeumannSide knorrer_inverse(const QuadricState& state, const Mat& a);

/// F0 = ((v,Av)_eps - 1)(u,Au)_eps - (u,Av)_eps^2; vanishes on N0.
double knorrer_f0(const Vec& u, const Vec& v, const Mat& a, const EpsForm& form);

/// Geodesic field on the quadric: dx = p, dp = -((p,A^{-1}p)/||A^{-1}x||^2) A^{-1}x.
std::pair<Vec, Vec> geodesic_rhs(const QuadricState& state, const Mat& a);
StateFn geodesic_flow(const Mat& a, const EpsForm& form);

/// G(z) = (1 + (S_z x, x))(S_z p, p) - (S_z x, p)^2, S_z = (zI - A)^{-1};
/// constant along the geodesic flow.
double G_of_z(const QuadricState& state, const Mat& a, double z);

/// Residues of G at the eigenvalues of A = diag(alphas) (eps = +1):
///   G_k = p_k^2 + sum_{j != k} (x_j p_k - x_k p_j)^2/(alpha_k - alpha_j).
Vec residues_geodesic(const QuadricState& state, const Vec& alphas);

/// ||A^{-1}x||_eps^2 (A^{-1}p, p)_eps, the classical quadric integral.
double joachimsthal(const QuadricState& state, const Mat& a);

/// Flat state (u, v, lambda, t) whose flow is the A^{-1}-Neumann field
/// plus d(lambda)/ds = 2((Au,v)/(Au,u)) lambda and dt/ds = 1/lambda.
/// Mapping through knorrer_forward and reading off t reproduces the
/// geodesic flow.
StateFn knorrer_conjugacy_flow(const Mat& a, const EpsForm& form);

Vec pack_conjugacy(const Vec& u, const Vec& v, double lambda, double t);
struct ConjugacyState {
  Vec u;
  Vec v;
  double lambda;
  double t;
};
ConjugacyState unpack_conjugacy(const Vec& state, std::size_t dim);

}  // namespace symflow
