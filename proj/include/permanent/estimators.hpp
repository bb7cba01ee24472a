#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "permanent/detail/parallel.hpp"
#include "permanent/matrix.hpp"
#include "permanent/rng.hpp"

namespace permanent {

/// Sampling law for the Monte Carlo estimators. Rademacher and Gaussian are
/// genuine zero-mean unit-variance distributions; SineWeighted draws theta
/// uniform on [0, 2pi), uses sin(theta) as the variable, and carries an
/// importance weight of 2 per coordinate so the same moment conditions hold
/// in the weighted sense (2 E[sin^2] = 1).
enum class DistributionKind { rademacher, gaussian, sine_weighted };

/// Result of a Monte Carlo run: sample mean of the per-sample kernel values,
/// its standard error (sample standard deviation / sqrt(N), with the N-1
/// variance denominator), and a 1.96-sigma interval.
struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::uint64_t kEstimatorDomain = 0x657374696D617465ull;

// Welford running moments with the standard pairwise merge, so worker-local
// accumulators combine deterministically in block order.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }

  void merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double delta = other.mean - mean;
    const double total = static_cast<double>(count + other.count);
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / total;
    count += other.count;
  }
};

inline EstimateReport report_from(const RunningMoments& acc,
                                  std::uint64_t seed) {
  EstimateReport r;
  r.samples = acc.count;
  r.seed = seed;
  r.estimate = acc.mean;
  if (acc.count > 1 && acc.m2 > 0.0) {
    const double variance = acc.m2 / static_cast<double>(acc.count - 1);
    r.std_error = std::sqrt(variance / static_cast<double>(acc.count));
  }
  r.ci95_low = r.estimate - 1.96 * r.std_error;
  r.ci95_high = r.estimate + 1.96 * r.std_error;
  return r;
}

}  // namespace detail

/// One draw of a sampling law: the variable value and its importance weight.
class DistributionSampler {
 public:
  explicit DistributionSampler(DistributionKind kind) : kind_(kind) {}

  DistributionKind kind() const { return kind_; }

  std::pair<double, double> draw(rng::Xoshiro256pp& gen) const {
    switch (kind_) {
      case DistributionKind::rademacher:
        return {gen.rademacher(), 1.0};
      case DistributionKind::gaussian:
        return {gen.normal(), 1.0};
      case DistributionKind::sine_weighted:
      default:
        return {std::sin(2.0 * std::numbers::pi * gen.uniform01()), 2.0};
    }
  }

  /// Fills x with one i.i.d. vector and returns the total weight
  /// (1 for Rademacher/Gaussian, 2^n for SineWeighted).
  double fill(rng::Xoshiro256pp& gen, std::span<double> x) const {
    double weight = 1.0;
    for (double& v : x) {
      auto [value, w] = draw(gen);
      v = value;
      weight *= w;
    }
    return weight;
  }

 private:
  DistributionKind kind_;
};

/// Per-sample kernel: weight * prod_i [ x_i sum_j a_{i,j} x_j ]. Its
/// expectation under any zero-mean unit-variance law (weighted, for the sine
/// instance) is perm(A). O(n^2).
inline double estimator_kernel(const SquareMatrix& a,
                               std::span<const double> x, double weight) {
  const std::size_t n = a.size();
  double prod = weight;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < n; ++j) dot += row[j] * x[j];
    prod *= x[i] * dot;
  }
  return prod;
}

/// Unbiased Monte Carlo estimate of perm(A) from n_samples kernel draws.
/// Worker k consumes the substream derived from (seed, k) and owns a
/// contiguous sample-index range; accumulators merge in block order, so the
/// report is bit-identical for fixed (A, dist, N, seed, workers).
inline EstimateReport sample_estimate(const SquareMatrix& a,
                                      DistributionKind dist,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed,
                                      unsigned workers = 1) {
  if (n_samples < 2)
    throw std::invalid_argument("need at least 2 samples for a std error");
  const unsigned w = workers == 0 ? 1u : workers;
  std::vector<detail::RunningMoments> parts(w);
  detail::run_blocks(
      n_samples, w, [&](unsigned k, std::uint64_t begin, std::uint64_t end) {
        auto gen = rng::Xoshiro256pp::substream(
            seed ^ detail::kEstimatorDomain, k);
        const DistributionSampler sampler(dist);
        std::vector<double> x(a.size());
        detail::RunningMoments acc;
        for (std::uint64_t i = begin; i < end; ++i) {
          const double weight = sampler.fill(gen, x);
          acc.add(estimator_kernel(a, x, weight));
        }
        parts[k] = acc;
      });
  detail::RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return detail::report_from(total, seed);
}

struct VarianceRow {
  DistributionKind kind;
  EstimateReport report;
};

/// One estimate per distribution, each from an independent substream derived
/// from `seed`. The per-row report carries the derived seed, so any row can
/// be reproduced with a direct sample_estimate call.
inline std::vector<VarianceRow> variance_profile(
    const SquareMatrix& a, std::span<const DistributionKind> kinds,
    std::uint64_t n_samples, std::uint64_t seed, unsigned workers = 1) {
  std::vector<VarianceRow> rows;
  rows.reserve(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::uint64_t row_seed = rng::derive_seed(seed, i);
    rows.push_back(
        {kinds[i], sample_estimate(a, kinds[i], n_samples, row_seed, workers)});
  }
  return rows;
}

}  // namespace permanent
