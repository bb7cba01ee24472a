#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "permanent/detail/guards.hpp"
#include "permanent/detail/parallel.hpp"
#include "permanent/errors.hpp"
#include "permanent/matrix.hpp"

namespace permanent {

/// Permanent by brute force over all n! permutations in lexicographic order.
/// The guard defaults to n <= 12 and is adjustable for stress runs.
inline double perm_naive(const SquareMatrix& a, std::size_t max_n = 12) {
  const std::size_t n = a.size();
  detail::check_dimension(n, max_n, "perm_naive");
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  double sum = 0.0;
  do {
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= a(i, sigma[i]);
    sum += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return sum;
}

/// Indicator that the 1-based tuple m is a permutation of (1..n), n = m.size().
/// Out-of-range or repeated entries make it 0.
inline int permutation_tensor(std::span<const int> m) {
  const std::size_t n = m.size();
  std::uint64_t seen = 0;
  for (int v : m) {
    if (v < 1 || static_cast<std::size_t>(v) > n) return 0;
    const std::uint64_t bit = std::uint64_t{1} << (v - 1);
    if (seen & bit) return 0;
    seen |= bit;
  }
  return 1;
}

/// Evaluates the permutation tensor through its Rademacher expectation,
/// 2^{-n} sum over x in {-1,+1}^n of prod_i x_i x_{m_i}. Every term is +-1 and
/// the divisor is a power of two, so the result is exact and must equal
/// permutation_tensor(m).
inline double delta_via_enumeration(std::span<const int> m) {
  const std::size_t n = m.size();
  detail::check_dimension(n, 8, "delta_via_enumeration");
  for (int v : m) {
    if (v < 1 || static_cast<std::size_t>(v) > n)
      throw std::out_of_range("tuple entry outside 1..n");
  }
  std::int64_t sum = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    // prod_i x_i x_{m_i} is -1 iff an odd number of factors have exactly one
    // of the two coordinates negative.
    unsigned parity = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned xi = (mask >> i) & 1u;
      const unsigned xmi = (mask >> (m[i] - 1)) & 1u;
      parity ^= xi ^ xmi;
    }
    sum += parity ? -1 : 1;
  }
  return static_cast<double>(sum) / static_cast<double>(total);
}

/// Permanent as the tensor contraction sum over all n^n index tuples of
/// Delta_m prod_j a_{j, m_j}. Exponentially worse than perm_naive; kept as an
/// independent cross-check of the tensor formulation.
inline double perm_delta_oracle(const SquareMatrix& a) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 7, "perm_delta_oracle");
  std::vector<int> tuple(n, 1);
  double sum = 0.0;
  while (true) {
    if (permutation_tensor(tuple) != 0) {
      double prod = 1.0;
      for (std::size_t j = 0; j < n; ++j) prod *= a(j, tuple[j] - 1);
      sum += prod;
    }
    // odometer increment over {1..n}^n
    std::size_t pos = 0;
    while (pos < n && tuple[pos] == static_cast<int>(n)) {
      tuple[pos] = 1;
      ++pos;
    }
    if (pos == n) break;
    ++tuple[pos];
  }
  return sum;
}

namespace detail {

// Shared Gray-code walk for the two Rademacher enumerations. Visits sign
// vectors indexed by t in [begin, end); the free bits of gray(t) drive the
// sign coordinates starting at `first_free`, lower coordinates stay +1.
// Row sums r_i = sum_j a_{i,j} s_j are updated in O(n) per flip and the
// n-factor product is recomputed per vector.
template <typename Acc>
inline void glynn_walk(const SquareMatrix& a, std::size_t first_free,
                       std::uint64_t begin, std::uint64_t end, Acc& acc) {
  const std::size_t n = a.size();
  if (begin >= end) return;
  const std::uint64_t gray0 = begin ^ (begin >> 1);
  std::vector<double> s(n, 1.0);
  for (std::size_t b = 0; first_free + b < n; ++b)
    s[first_free + b] = sign_of_bit(gray0, b);
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += a(i, j) * s[j];
    r[i] = dot;
  }
  double sign = (std::popcount(gray0) & 1u) ? -1.0 : 1.0;
  for (std::uint64_t t = begin; t < end; ++t) {
    if (t != begin) {
      const std::size_t j = first_free + std::countr_zero(t);
      s[j] = -s[j];
      const double step = 2.0 * s[j];
      for (std::size_t i = 0; i < n; ++i) r[i] += step * a(i, j);
      sign = -sign;
    }
    double prod = sign;
    for (std::size_t i = 0; i < n; ++i) prod *= r[i];
    acc.add(prod);
  }
}

struct PlainSum {
  double sum = 0.0;
  void add(double v) { sum += v; }
  double value() const { return sum; }
};

}  // namespace detail

/// Glynn's formula: 2^{1-n} sum over the 2^{n-1} sign vectors with s_1 = +1
/// of prod_i s_i sum_j a_{i,j} s_j. Gray-code ordering keeps the row-sum
/// update cost at O(n) per vector. Blocks of the Gray sequence may run on
/// parallel workers; block sums merge in block order, so the result is
/// bit-reproducible for a fixed worker count. `compensated` switches the
/// per-block accumulator to Neumaier summation.
inline double perm_glynn(const SquareMatrix& a, unsigned workers = 1,
                         bool compensated = false) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 30, "perm_glynn");
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  const unsigned w = workers == 0 ? 1u : workers;
  std::vector<double> partial(w, 0.0);
  detail::run_blocks(total, w,
                     [&](unsigned k, std::uint64_t begin, std::uint64_t end) {
                       if (compensated) {
                         detail::CompensatedSum acc;
                         detail::glynn_walk(a, 1, begin, end, acc);
                         partial[k] = acc.value();
                       } else {
                         detail::PlainSum acc;
                         detail::glynn_walk(a, 1, begin, end, acc);
                         partial[k] = acc.value();
                       }
                     });
  double sum = 0.0;
  for (double p : partial) sum += p;
  return std::ldexp(sum, 1 - static_cast<int>(n));
}

/// Unhalved Rademacher average 2^{-n} sum over all 2^n sign vectors of
/// prod_i s_i sum_j a_{i,j} s_j. Agrees with perm_glynn; the halving step is
/// exactly the s -> -s symmetry of the summand.
inline double rademacher_full_enumeration(const SquareMatrix& a) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 20, "rademacher_full_enumeration");
  detail::PlainSum acc;
  detail::glynn_walk(a, 0, 0, std::uint64_t{1} << n, acc);
  return std::ldexp(acc.value(), -static_cast<int>(n));
}

}  // namespace permanent
