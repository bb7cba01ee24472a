#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "permanent/detail/guards.hpp"
#include "permanent/detail/parallel.hpp"
#include "permanent/errors.hpp"
#include "permanent/matrix.hpp"

namespace permanent {

/// Multilinear polynomial in n variables over R[x_1..x_n]/(x_i^2 = 0).
/// Coefficients are indexed by subset bit masks: coeff(S) multiplies
/// prod_{i in S} x_i, with bit i standing for variable x_{i+1}.
class SubsetPolynomial {
 public:
  /// Zero polynomial in n_vars variables (2^n_vars coefficients).
  explicit SubsetPolynomial(std::size_t n_vars)
      : n_(n_vars), coeffs_(std::size_t{1} << n_vars, 0.0) {}

  static SubsetPolynomial one(std::size_t n_vars) {
    SubsetPolynomial p(n_vars);
    p.coeffs_[0] = 1.0;
    return p;
  }

  std::size_t vars() const { return n_; }
  std::size_t term_count() const { return coeffs_.size(); }
  std::uint64_t full_mask() const { return (std::uint64_t{1} << n_) - 1; }

  double coeff(std::uint64_t mask) const { return coeffs_[mask]; }
  void set_coeff(std::uint64_t mask, double v) { coeffs_[mask] = v; }

  SubsetPolynomial& operator+=(const SubsetPolynomial& other) {
    if (other.n_ != n_)
      throw DimensionMismatch("polynomials have different variable counts");
    for (std::size_t s = 0; s < coeffs_.size(); ++s)
      coeffs_[s] += other.coeffs_[s];
    return *this;
  }

  friend SubsetPolynomial operator+(SubsetPolynomial lhs,
                                    const SubsetPolynomial& rhs) {
    lhs += rhs;
    return lhs;
  }

  bool operator==(const SubsetPolynomial&) const = default;

 private:
  std::size_t n_;
  std::vector<double> coeffs_;
};

/// Subset convolution (f*g)(S) = sum over T subset of S of f(T) g(S\T);
/// the product rule of the square-free quotient ring. O(3^n) via the
/// submask enumeration trick.
inline SubsetPolynomial subset_multiply(const SubsetPolynomial& f,
                                        const SubsetPolynomial& g) {
  if (f.vars() != g.vars())
    throw DimensionMismatch("polynomials have different variable counts");
  SubsetPolynomial h(f.vars());
  const std::uint64_t full = f.full_mask();
  for (std::uint64_t s = 0;; ++s) {
    double acc = 0.0;
    for (std::uint64_t t = s;; t = (t - 1) & s) {
      acc += f.coeff(t) * g.coeff(s ^ t);
      if (t == 0) break;
    }
    h.set_coeff(s, acc);
    if (s == full) break;
  }
  return h;
}

namespace detail {

// Determinant of the principal submatrix of `a` on the index set `mask`,
// by Gaussian elimination with partial pivoting. Pivot magnitudes below
// 1e-300 are treated as exact zeros (singular minor).
inline double principal_minor(const SquareMatrix& a, std::uint64_t mask,
                              std::vector<double>& scratch,
                              std::vector<std::size_t>& index) {
  index.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((mask >> i) & 1u) index.push_back(i);
  }
  const std::size_t k = index.size();
  if (k == 0) return 1.0;
  scratch.resize(k * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c)
      scratch[r * k + c] = a(index[r], index[c]);

  double det = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(scratch[r * k + col]) >
          std::abs(scratch[pivot * k + col]))
        pivot = r;
    }
    const double p = scratch[pivot * k + col];
    if (std::abs(p) < 1e-300) return 0.0;
    if (pivot != col) {
      for (std::size_t c = col; c < k; ++c)
        std::swap(scratch[pivot * k + c], scratch[col * k + c]);
      det = -det;
    }
    det *= p;
    for (std::size_t r = col + 1; r < k; ++r) {
      const double factor = scratch[r * k + col] / p;
      if (factor == 0.0) continue;
      for (std::size_t c = col + 1; c < k; ++c)
        scratch[r * k + c] -= factor * scratch[col * k + c];
    }
  }
  return det;
}

// Masks of {0..2^n-1} ordered by popcount, then numerically. The series
// inverse recursion needs every proper subset before its superset, which
// this order guarantees with a flat loop.
inline std::vector<std::uint64_t> masks_by_popcount(std::size_t n) {
  std::vector<std::uint64_t> order;
  order.reserve(std::size_t{1} << n);
  for (std::size_t layer = 0; layer <= n; ++layer) {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      if (static_cast<std::size_t>(std::popcount(s)) == layer)
        order.push_back(s);
    }
  }
  return order;
}

}  // namespace detail

/// Image of det(I - XA) in the square-free ring: coefficient of
/// prod_{i in S} x_i is (-1)^{|S|} det(A_S) over principal minors A_S.
/// Row i of XA carries x_i linearly, so this expansion is exact, not a
/// truncation. Minors are independent, so masks may be split across workers
/// with each coefficient written once.
inline SubsetPolynomial det_minor_expansion(const SquareMatrix& a,
                                            unsigned workers = 1) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 16, "det_minor_expansion");
  SubsetPolynomial f(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  detail::run_blocks(total, workers,
                     [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                       std::vector<double> scratch;
                       std::vector<std::size_t> index;
                       for (std::uint64_t s = begin; s < end; ++s) {
                         const double minor =
                             detail::principal_minor(a, s, scratch, index);
                         const double sign =
                             (std::popcount(s) & 1) ? -1.0 : 1.0;
                         f.set_coeff(s, sign * minor);
                       }
                     });
  return f;
}

/// Multiplicative inverse of f in the quotient ring, defined whenever the
/// constant term is nonzero: g(empty) = 1/f(empty) and, layer by layer,
/// g(S) = -(1/f(empty)) sum over nonempty T subset of S of f(T) g(S\T).
inline SubsetPolynomial series_inverse(const SubsetPolynomial& f) {
  const double c0 = f.coeff(0);
  if (c0 == 0.0) throw NonInvertible("constant term is zero");
  SubsetPolynomial g(f.vars());
  g.set_coeff(0, 1.0 / c0);
  const auto order = detail::masks_by_popcount(f.vars());
  for (std::uint64_t s : order) {
    if (s == 0) continue;
    double acc = 0.0;
    for (std::uint64_t t = s; t != 0; t = (t - 1) & s)
      acc += f.coeff(t) * g.coeff(s ^ t);
    g.set_coeff(s, -acc / c0);
  }
  return g;
}

/// Permanent as the x_1...x_n coefficient of 1/det(I - XA) (MacMahon route,
/// simplified to the square-free ring). Needs no det(A) != 0 condition:
/// the series inverse only divides by the constant term, which is 1.
inline double perm_macmahon(const SquareMatrix& a, unsigned workers = 1) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 16, "perm_macmahon");
  const SubsetPolynomial f = det_minor_expansion(a, workers);
  const SubsetPolynomial g = series_inverse(f);
  return g.coeff(g.full_mask());
}

}  // namespace permanent
