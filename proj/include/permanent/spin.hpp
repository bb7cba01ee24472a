#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "permanent/detail/guards.hpp"
#include "permanent/detail/parallel.hpp"
#include "permanent/errors.hpp"
#include "permanent/estimators.hpp"
#include "permanent/matrix.hpp"
#include "permanent/rng.hpp"

namespace permanent {

/// Spin system with coupling matrix W and inverse temperature beta.
/// The Boltzmann weight is stored in the positive convention
/// exp(+(beta/2) s^T W s); callers whose coupling carries the physics minus
/// sign pass -W.
struct SpinSystem {
  SquareMatrix coupling;
  double beta = 1.0;
};

namespace detail {

inline constexpr std::uint64_t kCoshDomain = 0x636F73686D6F6Dull;
inline constexpr double kMaxExponent = 709.78;  // log(DBL_MAX), rounded down

inline void check_exponent(double e) {
  if (e > kMaxExponent)
    throw OverflowToInfinity("exponent " + std::to_string(e) +
                             " exceeds double range");
}

}  // namespace detail

/// Partition function sum over s in {-1,+1}^n of exp((beta/2) s^T W s), by
/// full enumeration. The vector r = W s is updated in O(n) per Gray-code
/// flip and the quadratic form is re-contracted as s.r each step.
inline double partition_function(const SpinSystem& sys) {
  const SquareMatrix& w = sys.coupling;
  const std::size_t n = w.size();
  detail::check_dimension(n, 20, "partition_function");
  if (!(sys.beta > 0.0)) throw std::invalid_argument("beta must be positive");

  std::vector<double> s(n, 1.0);
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += w(i, j) * s[j];
    r[i] = dot;
  }
  double sum = 0.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t t = 0; t < total; ++t) {
    if (t != 0) {
      const std::size_t j = static_cast<std::size_t>(std::countr_zero(t));
      s[j] = -s[j];
      const double step = 2.0 * s[j];
      for (std::size_t i = 0; i < n; ++i) r[i] += step * w(i, j);
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += s[i] * r[i];
    const double exponent = 0.5 * sys.beta * q;
    detail::check_exponent(exponent);
    sum += std::exp(exponent);
  }
  if (std::isinf(sum))
    throw OverflowToInfinity("partition function sum overflowed");
  return sum;
}

/// Extracts the x_1...x_n coefficient of the spin generating function
/// F(x) = sum_s exp((1/2) sum_{ij} s_i x_i a_{i,j} s_j) with the mixed
/// forward-difference operator h^{-n} sum_{S} (-1)^{n-|S|} F(h 1_S), which
/// equals perm(A) + O(h).
///
/// Because F(h 1_S) = sum_s prod_{i in S} e^{h v_i(s)} with
/// v_i(s) = (1/2) s_i (A s)_i, the alternating subset sum factors per spin
/// configuration into prod_i (e^{h v_i} - 1). Evaluating that factored form
/// with expm1 avoids the catastrophic cancellation of differencing 2^n
/// near-equal F values at small h; the operator itself is unchanged.
inline double perm_spin_fd(const SquareMatrix& a, double h) {
  const std::size_t n = a.size();
  detail::check_dimension(n, 10, "perm_spin_fd");
  if (!(h > 0.0) || h > 0.1)
    throw std::invalid_argument("h must lie in (0, 0.1]");
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> s(n);
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i)
      s[i] = detail::sign_of_bit(mask, i);
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += a(i, j) * s[j];
      const double v = 0.5 * s[i] * dot;
      prod *= std::expm1(h * v) / h;
    }
    sum += prod;
  }
  return sum;
}

/// Sampler for N(0, W): stores the lower-triangular L with L L^T = W and
/// draws phi = L z from i.i.d. standard normals.
class MvnSampler {
 public:
  explicit MvnSampler(SquareMatrix chol) : chol_(std::move(chol)) {}

  std::size_t dim() const { return chol_.size(); }
  const SquareMatrix& cholesky_factor() const { return chol_; }

  /// Draws z ~ N(0, I) into `out`, then applies L in place from the last
  /// row backward (row i only reads z_j with j <= i), so no scratch is
  /// needed and the sampler stays immutable and shareable across workers.
  void sample(rng::Xoshiro256pp& gen, std::span<double> out) const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) out[i] = gen.normal();
    for (std::size_t i = n; i-- > 0;) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += chol_(i, j) * out[j];
      out[i] = acc;
    }
  }

 private:
  SquareMatrix chol_;
};

/// Cholesky factorization of a symmetric W with positive pivots. A pivot
/// that is exactly zero with a zero column remainder marks a degenerate
/// coordinate (phi_i identically 0) and is accepted; a negative pivot, or a
/// zero pivot with leftover coupling, raises NotPositiveDefinite because no
/// genuine normal law has that covariance.
inline MvnSampler build_mvn_sampler(const SquareMatrix& w) {
  const std::size_t n = w.size();
  double scale = 0.0;
  for (double v : w.entries()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(w(i, j) - w(j, i)) > 1e-12 * scale)
        throw NotSymmetric("covariance matrix is not symmetric");
    }
  }
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = w(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (d < 0.0)
      throw NotPositiveDefinite("pivot " + std::to_string(d) +
                                " at index " + std::to_string(j));
    if (d == 0.0) {
      for (std::size_t i = j + 1; i < n; ++i) {
        double c = w(i, j);
        for (std::size_t k = 0; k < j; ++k) c -= l[i * n + k] * l[j * n + k];
        if (c != 0.0)
          throw NotPositiveDefinite(
              "zero pivot with remaining coupling at index " +
              std::to_string(j));
      }
      continue;  // degenerate coordinate, L column stays zero
    }
    const double root = std::sqrt(d);
    l[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double c = w(i, j);
      for (std::size_t k = 0; k < j; ++k) c -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = c / root;
    }
  }
  return MvnSampler(SquareMatrix(n, std::move(l)));
}

/// Monte Carlo estimate of E[prod_i 2 cosh(phi_i)] with phi ~ N(0, W).
/// Summing the normal moment-generating function over spin assignments shows
/// this expectation equals partition_function({W, beta=1}). Same worker and
/// substream contract as sample_estimate.
inline EstimateReport cosh_moment_mc(const SquareMatrix& w,
                                     std::uint64_t n_samples,
                                     std::uint64_t seed,
                                     unsigned workers = 1) {
  if (n_samples < 2)
    throw std::invalid_argument("need at least 2 samples for a std error");
  const MvnSampler sampler = build_mvn_sampler(w);
  const unsigned nw = workers == 0 ? 1u : workers;
  std::vector<detail::RunningMoments> parts(nw);
  detail::run_blocks(
      n_samples, nw, [&](unsigned k, std::uint64_t begin, std::uint64_t end) {
        auto gen =
            rng::Xoshiro256pp::substream(seed ^ detail::kCoshDomain, k);
        std::vector<double> phi(w.size());
        detail::RunningMoments acc;
        for (std::uint64_t i = begin; i < end; ++i) {
          sampler.sample(gen, phi);
          double prod = 1.0;
          for (double p : phi) prod *= 2.0 * std::cosh(p);
          acc.add(prod);
        }
        parts[k] = acc;
      });
  detail::RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return detail::report_from(total, seed);
}

}  // namespace permanent
