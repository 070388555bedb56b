#pragma once

#include <string>
#include <utility>

#include "symflow/integrator.hpp"
#include "symflow/neumann.hpp"

namespace symflow {

/// Stereographic chart data: sphere/hyperboloid radius h and the curvature
/// sign, for points in R^{n+1} and images in R^n.
struct StereoParams {
  double h = 1.0;
  int eps = 1;
  std::size_t n = 0;

  EpsForm form() const { return EpsForm{n, eps}; }
};

struct KeplerState {
  Vec q;
  Vec p;
};

/// The A = 0 field on the rank-one orbit: dx = ||x||_eps^2 y,
/// dy = -||y||_eps^2 x. Great circles / great hyperbolas on the right
/// energy level.
std::pair<Vec, Vec> free_rhs(const RankOneState& state);
StateFn free_flow(const EpsForm& form);

/// Euclidean wedge a b^T - b a^T (n x n).
Mat wedge_euclid(const Vec& a, const Vec& b);

/// p = (h/(h - x0)) (x1..xn); inverse of the sphere chart
///   x0 = h(||p||^2 - eps h^2)/(||p||^2 + eps h^2),
///   xbar = (2 eps h^2/(||p||^2 + eps h^2)) p.
Vec stereo_project(const Vec& x, const StereoParams& params);

/// The point on ||x||_eps^2 = h^2 with stereographic image p.
Vec stereo_point(const Vec& p, const StereoParams& params);

/// Cotangent lift: given (q, p) in R^n x R^n returns (x, y) with x the
/// stereographic point of p and
///   y = ((q.p)/h, ((||p||^2 + eps h^2)/(2h^2)) q - ((q.p)/h^2) p).
/// Pulls the canonical one-form q.dp back to (y, dx)_eps.
std::pair<Vec, Vec> stereo_lift(const Vec& q, const Vec& p, const StereoParams& params);

/// Inverse of the lift: maps an orbit point (x, y) to (q, p) in closed
/// form, no Jacobian assembly.
KeplerState transport_point(const Vec& x, const Vec& y, const StereoParams& params);

/// dq = p, dp = -q/||q||^3. Throws on near-collision ||q|| < 1e-12.
std::pair<Vec, Vec> kepler_rhs(const KeplerState& state);
StateFn kepler_flow(std::size_t n);

double kepler_energy(const KeplerState& state);

/// Maps a free-flow trajectory on the level H = eps/(2h^2) to Kepler
/// trajectories, reparametrizing time by dt = (-eps/h^2)||q|| ds
/// (trapezoidal accumulation). Arcs passing within 1e-6 of the projection
/// pole x0 = h are split; each returned arc has strictly increasing times.
std::vector<Trajectory> transport_to_kepler(const Trajectory& traj,
                                            const StereoParams& params);

struct MomentumLenz {
  Mat L;           // n x n angular momentum block, equals q ^ p
  Vec F;           // Runge-Lenz vector h(x0 ybar - y0 xbar)
  bool degenerate = false;  // radial case, L = 0
};

MomentumLenz momentum_and_lenz(const Vec& x, const Vec& y, const StereoParams& params);

struct ConicReport {
  std::string type;  // "ellipse", "parabola", "hyperbola", "line"
  double eccentricity = 0.0;
  double latus_rectum = 0.0;  // ||L||^2
  double energy = 0.0;
  double max_focal_residual = 0.0;
  bool degenerate_line = false;
};

/// Classifies a Kepler (q, p) trajectory by its eccentricity vector and
/// reports the focal-equation residual ||q||(1 + e cos phi) - ||L||^2.
ConicReport conic_classify(const Trajectory& traj);

/// Field of the Euclidean free Hamiltonian H0 = (1/8)||p||^4 ||q||^2 in the
/// sign convention dp/dt = +dH/dq, dq/dt = -dH/dp used by the flat limit of
/// the stereographic flow.
StateFn euclidean_free_flow(std::size_t n);

struct EuclideanLimitReport {
  double max_w_second_diff = 0.0;   // straightness of w = 2p/||p||^2
  double max_parabola_residual = 0.0;
  double max_energy = 0.0;          // |E| samples, expected 0
  double max_roundtrip = 0.0;       // p -> w -> p involution
};

/// Verifies the flat-limit picture on an H0 = 1/2 trajectory:
/// w = 2p/||p||^2 is a straight line and q follows
/// q(t) = 1/2 (b(||a||^2 - ||b||^2 t^2) - 2a((a,b) + ||b||^2 t)).
EuclideanLimitReport euclidean_limit_check(const Trajectory& traj);

}  // namespace symflow
