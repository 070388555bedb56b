#pragma once

#include <complex>
#include <utility>

#include "symflow/cartan.hpp"
#include "symflow/integrator.hpp"

namespace symflow {

/// A point (x, y) of the rank-one coadjoint orbit, i.e. of the cotangent
/// bundle of the sphere/hyperboloid ||x||_eps = radius, (x,y)_eps = 0.
struct RankOneState {
  Vec x;
  Vec y;
  EpsForm form;
  double radius = 1.0;
};

/// Throws when the constraints are violated beyond tol.
void validate_rank_one(const RankOneState& state, double tol = 1e-10);

RankOneState make_rank_one_state(Vec x, Vec y, const EpsForm& form, double radius = 1.0);

/// Constraint projection on the flat (x, y) state: rescales x onto the
/// ||x||_eps = radius sheet (requires ||x||_eps^2 > 0), then removes the
/// (x,y)_eps component of y. Idempotent.
Vec project_rank_one(const Vec& state, const EpsForm& form, double radius);

Vec pack_phase(const Vec& x, const Vec& y);
std::pair<Vec, Vec> unpack_phase(const Vec& state, std::size_t dim);

/// Lp = (x (x) x)_eps - (||x||^2/(n+1)) I,  Lk = (x ^ y)_eps.
CartanElement orbit_embed(const RankOneState& state);

/// dx/dt = ||x||_eps^2 y,
/// dy/dt = -A x + ((Ax,x)_eps/||x||_eps^2 - ||y||_eps^2) x.
/// Errors when ||x||_eps^2 vanishes (hyperbolic null sheet).
std::pair<Vec, Vec> neumann_rhs(const RankOneState& state, const Mat& a);

/// neumann_rhs as a flat-state field.
StateFn neumann_flow(const Mat& a, const EpsForm& form);

/// H0 = 1/2 (||y||_eps^2 + (Ax,x)_eps); conserved along neumann_rhs.
double constrained_hamiltonian(const RankOneState& state, const Mat& a);

/// F(z) = (R_z x, x) + (R_z x, x)(R_z y, y) - (R_z x, y)^2 with
/// R_z = (zI - A)^{-1}; a first integral of the Neumann flow.
/// Throws near the spectrum of A (resolvent magnitude guard).
double F_of_z(const RankOneState& state, const Mat& a, double z);

/// Same rational function continued to complex z; used by the residue-limit
/// oracles near the complex poles of the hyperbolic case.
std::complex<double> F_of_z_complex(const RankOneState& state, const Mat& a,
                                    std::complex<double> z);

struct ResidueSet {
  std::vector<std::complex<double>> alphas;
  std::vector<std::complex<double>> values;

  std::complex<double> sum() const {
    std::complex<double> s = 0.0;
    for (auto v : values) s += v;
    return s;
  }
};

/// Euclidean residues of F at the eigenvalues of A = diag(alphas):
///   F_k = x_k^2 + sum_{j != k} (x_j y_k - x_k y_j)^2 / (alpha_k - alpha_j).
ResidueSet residues_euclidean(const RankOneState& state, const Vec& alphas);

/// Complex coordinates of the hyperbolic case:
///   v0 = (x0 + i x1)/sqrt2, v1 = (x0 - i x1)/sqrt2, v_j = i x_j (j >= 2),
/// and the same pattern for w from y.
std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
hyperbolic_coords(const RankOneState& state);

/// Block-canonical hyperbolic drift: rotation block alpha on coordinates
/// (0,1) plus diag(d) on the rest. d must have n-1 entries.
Mat hyperbolic_block_a(double alpha, const Vec& d, const EpsForm& form);

/// Residues of F for the block-canonical hyperbolic case, with poles
/// alpha_0 = i*alpha, alpha_1 = -i*alpha and the real d's. Verifies
/// F_1 = conj(F_0) internally.
ResidueSet residues_hyperbolic(const RankOneState& state, double alpha, const Vec& d);

}  // namespace symflow
