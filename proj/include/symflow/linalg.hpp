#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace symflow {

using Vec = std::vector<double>;

/// Dense row-major real matrix. Sizes here stay small (desk scale), so no
/// attempt is made at blocking or expression templates.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  Mat transposed() const;
  double trace() const;
  /// Largest entry in absolute value; used to scale symmetry tolerances.
  double max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator-(const Mat& a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

/// [a, b] = ab - ba.
Mat commutator(const Mat& a, const Mat& b);

Vec vadd(const Vec& a, const Vec& b);
Vec vsub(const Vec& a, const Vec& b);
Vec vscale(double s, const Vec& a);
double vdot(const Vec& a, const Vec& b);      // Euclidean
double vnorm(const Vec& a);                   // Euclidean
double vmax_abs(const Vec& a);
Vec vcat(const Vec& a, const Vec& b);

/// Flatten / restore between Mat and Vec (row-major), for ODE state packing.
Vec mat_to_vec(const Mat& m);
Mat vec_to_mat(const Vec& v, std::size_t rows, std::size_t cols);

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Gaussian elimination with partial pivoting, templated so the same code
// serves real and complex resolvents.
template <typename T>
std::vector<T> gauss_solve(std::vector<T> a, std::size_t n, std::vector<T> b,
                           double rel_pivot_floor = 1e-13) {
  using std::abs;
  double scale = 0.0;
  for (const T& v : a) scale = std::max(scale, static_cast<double>(abs(v)));
  if (scale == 0.0) throw SingularMatrixError("gauss_solve: zero matrix");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = abs(a[i * n + k]);
      if (v > best) { best = v; piv = i; }
    }
    if (best < rel_pivot_floor * scale)
      throw SingularMatrixError("gauss_solve: matrix singular to working precision");
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      T f = a[i * n + k] / a[k * n + k];
      if (f == T(0)) continue;
      a[i * n + k] = T(0);
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

}  // namespace detail

/// Solves A x = b by Gaussian elimination with partial pivoting.
Vec solve(const Mat& a, const Vec& b);

/// Dense inverse, column by column through `solve`.
Mat inverse(const Mat& a);

/// det(A) via LU; used only by test oracles and small checks.
double determinant(Mat a);

std::vector<std::complex<double>> solve_complex(const std::vector<std::complex<double>>& a,
                                                std::size_t n,
                                                const std::vector<std::complex<double>>& b);

bool all_finite(const Vec& v);

/// Deterministic RNG helpers. std::uniform_real_distribution is
/// implementation-defined, so scenario seeding uses raw mt19937_64 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {
    // xorshift-ish warmup keeps nearby seeds decorrelated
    for (int i = 0; i < 8; ++i) next_u64();
  }
  std::uint64_t next_u64() {
    std::uint64_t x = s_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    s_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }
  /// Uniform in [-1, 1).
  double sym() { return uniform() * 2.0 - 1.0; }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t s_;
};

}  // namespace symflow
