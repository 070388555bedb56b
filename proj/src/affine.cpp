#include "symflow/affine.hpp"

namespace symflow {

AffineSystem make_affine_system(Mat A, double s, const EpsForm& form) {
  if (A.rows() != form.dim() || A.cols() != form.dim())
    throw std::invalid_argument("make_affine_system: A has wrong shape");
  if (!is_eps_symmetric(A, form, 1e-10))
    throw std::invalid_argument("make_affine_system: A is not eps-symmetric");
  return {std::move(A), s, form};
}

double affine_hamiltonian(const CartanElement& l, const AffineSystem& sys) {
  return 0.5 * trace_form(l.k, l.k) + trace_form(sys.A, l.p);
}

CartanElement general_rhs(const CartanElement& l, const CartanElement& dh, double s) {
  Mat dk = bracket(dh.k, l.k) + bracket(dh.p, l.p);
  Mat dp = bracket(dh.k, l.p) + s * bracket(dh.p, l.k);
  return {dp, dk};
}

CartanElement extremal_rhs(const CartanElement& l, const AffineSystem& sys) {
  Mat dp = bracket(sys.A * sys.s - l.p, l.k);
  Mat dk = bracket(sys.A, l.p);
  return {dp, dk};
}

Vec pack_cartan(const CartanElement& l) { return vcat(mat_to_vec(l.p), mat_to_vec(l.k)); }

CartanElement unpack_cartan(const Vec& state, std::size_t dim) {
  std::size_t sz = dim * dim;
  if (state.size() != 2 * sz) throw std::invalid_argument("unpack_cartan: size mismatch");
  Vec vp(state.begin(), state.begin() + sz);
  Vec vk(state.begin() + sz, state.end());
  return {vec_to_mat(vp, dim, dim), vec_to_mat(vk, dim, dim)};
}

std::function<Vec(const Vec&)> extremal_flow(const AffineSystem& sys) {
  std::size_t dim = sys.form.dim();
  return [sys, dim](const Vec& state) {
    CartanElement l = unpack_cartan(state, dim);
    return pack_cartan(extremal_rhs(l, sys));
  };
}

}  // namespace symflow
