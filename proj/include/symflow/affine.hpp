#pragma once

#include <functional>

#include "symflow/cartan.hpp"

namespace symflow {

/// Drift matrix A, deformation parameter s (0 = semidirect, 1 = full
/// bracket), and the form the algebra is built on. Regularity of A is not
/// checked; a degenerate A just yields fewer independent invariants.
struct AffineSystem {
  Mat A;
  double s = 1.0;
  EpsForm form;
};

/// Builds an AffineSystem, checking that A is eps-symmetric.
AffineSystem make_affine_system(Mat A, double s, const EpsForm& form);

/// H = 1/2 <Lk, Lk> + <A, Lp>.
double affine_hamiltonian(const CartanElement& l, const AffineSystem& sys);

/// Hamiltonian field for an arbitrary differential dh = dh_p + dh_k:
///   dLk/dt = [dh_k, Lk] + [dh_p, Lp],   dLp/dt = [dh_k, Lp] + s [dh_p, Lk].
CartanElement general_rhs(const CartanElement& l, const CartanElement& dh, double s);

/// The extremal field of the affine Hamiltonian (dh = Lk + A):
///   dLp/dt = [sA - Lp, Lk],   dLk/dt = [A, Lp].
CartanElement extremal_rhs(const CartanElement& l, const AffineSystem& sys);

/// State packing for integration: concat(vec(Lp), vec(Lk)).
Vec pack_cartan(const CartanElement& l);
CartanElement unpack_cartan(const Vec& state, std::size_t dim);

/// Wraps extremal_rhs as a flat-state derivative function.
std::function<Vec(const Vec&)> extremal_flow(const AffineSystem& sys);

}  // namespace symflow
