#include "permanent/estimators.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "permanent/exact.hpp"
#include "permanent/matrix.hpp"

namespace {

using permanent::DistributionKind;
using permanent::DistributionSampler;
using permanent::EstimateReport;
using permanent::GeneratorKind;
using permanent::SquareMatrix;

constexpr std::array<DistributionKind, 3> kAllKinds = {
    DistributionKind::rademacher, DistributionKind::gaussian,
    DistributionKind::sine_weighted};

TEST(EstimatorKernel, WorkedExamples) {
  const SquareMatrix a{{1, 2}, {3, 4}};
  const std::vector<double> x{1.0, 1.0};
  // (1*(1+2)) * (1*(3+4)) = 21
  EXPECT_EQ(permanent::estimator_kernel(a, x, 1.0), 21.0);

  const SquareMatrix id3 = permanent::generate({GeneratorKind::identity, 3, 0});
  const std::vector<double> ones3{1.0, 1.0, 1.0};
  EXPECT_EQ(permanent::estimator_kernel(id3, ones3, 1.0), 1.0);

  const SquareMatrix ones2 = permanent::generate({GeneratorKind::ones, 2, 0});
  const std::vector<double> with_zero{0.0, 1.0};
  EXPECT_EQ(permanent::estimator_kernel(ones2, with_zero, 1.0), 0.0);

  EXPECT_EQ(permanent::estimator_kernel(a, x, 4.0), 84.0);
}

TEST(DistributionSampler, MomentConditions) {
  // weighted mean ~ 0 and weighted second moment ~ 1 for every law
  constexpr std::uint64_t kDraws = 1000000;
  for (DistributionKind kind : kAllKinds) {
    const DistributionSampler sampler(kind);
    auto gen = permanent::rng::Xoshiro256pp(2024);
    double mean = 0.0, second = 0.0;
    for (std::uint64_t i = 0; i < kDraws; ++i) {
      const auto [value, weight] = sampler.draw(gen);
      mean += weight * value;
      second += weight * value * value;
    }
    mean /= static_cast<double>(kDraws);
    second /= static_cast<double>(kDraws);
    EXPECT_LE(std::abs(mean), 0.01) << "kind " << static_cast<int>(kind);
    EXPECT_LE(std::abs(second - 1.0), 0.01) << "kind " << static_cast<int>(kind);
  }
}

TEST(SampleEstimate, RequiresTwoSamples) {
  const SquareMatrix a{{1.0}};
  EXPECT_THROW(
      permanent::sample_estimate(a, DistributionKind::gaussian, 1, 0),
      std::invalid_argument);
}

TEST(SampleEstimate, UnbiasedWithinFourSigma) {
  const SquareMatrix targets[] = {
      permanent::generate({GeneratorKind::ones, 3, 0}),
      permanent::generate({GeneratorKind::identity, 3, 0}),
      permanent::generate({GeneratorKind::uniform_random, 4, 8})};
  for (const SquareMatrix& a : targets) {
    const double truth = permanent::perm_naive(a);
    for (DistributionKind kind : kAllKinds) {
      const EstimateReport rep =
          permanent::sample_estimate(a, kind, 200000, 4242);
      // rademacher on the identity has kernel identically 1: stderr is 0 and
      // the estimate is exact; everywhere else the spread must be positive
      if (rep.std_error == 0.0) {
        EXPECT_EQ(rep.estimate, truth);
        EXPECT_EQ(kind, DistributionKind::rademacher);
      } else {
        EXPECT_LE(std::abs(rep.estimate - truth), 4.0 * rep.std_error)
            << "kind " << static_cast<int>(kind) << " truth " << truth;
      }
    }
  }
}

TEST(SampleEstimate, SineWeightedOneByOne) {
  // per-sample value 2 a sin^2(theta); its mean converges to a
  const SquareMatrix a{{3.0}};
  const EstimateReport rep = permanent::sample_estimate(
      a, DistributionKind::sine_weighted, 200000, 7);
  EXPECT_LE(std::abs(rep.estimate - 3.0), 4.0 * rep.std_error);
}

TEST(SampleEstimate, ZeroMatrixIsExactlyZero) {
  const SquareMatrix zero(3);
  for (DistributionKind kind : kAllKinds) {
    const EstimateReport rep = permanent::sample_estimate(zero, kind, 1000, 5);
    EXPECT_EQ(rep.estimate, 0.0);
    EXPECT_EQ(rep.std_error, 0.0);
    EXPECT_EQ(rep.ci95_low, 0.0);
    EXPECT_EQ(rep.ci95_high, 0.0);
  }
}

TEST(SampleEstimate, DeterministicPerWorkerCount) {
  const SquareMatrix a = permanent::generate({GeneratorKind::ones, 4, 0});
  for (unsigned workers : {1u, 3u}) {
    const EstimateReport r1 = permanent::sample_estimate(
        a, DistributionKind::gaussian, 50000, 99, workers);
    const EstimateReport r2 = permanent::sample_estimate(
        a, DistributionKind::gaussian, 50000, 99, workers);
    EXPECT_EQ(0, std::memcmp(&r1.estimate, &r2.estimate, sizeof(double)));
    EXPECT_EQ(0, std::memcmp(&r1.std_error, &r2.std_error, sizeof(double)));
    EXPECT_EQ(r1.samples, r2.samples);
    EXPECT_EQ(r1.seed, r2.seed);
  }
}

TEST(SampleEstimate, SeedChangesTheDraws) {
  const SquareMatrix a = permanent::generate({GeneratorKind::ones, 3, 0});
  const EstimateReport r1 =
      permanent::sample_estimate(a, DistributionKind::gaussian, 1000, 1);
  const EstimateReport r2 =
      permanent::sample_estimate(a, DistributionKind::gaussian, 1000, 2);
  EXPECT_NE(r1.estimate, r2.estimate);
}

TEST(SampleEstimate, ReportInvariants) {
  const SquareMatrix a = permanent::generate({GeneratorKind::uniform_random, 3, 3});
  const EstimateReport rep =
      permanent::sample_estimate(a, DistributionKind::rademacher, 5000, 11);
  EXPECT_LE(rep.ci95_low, rep.estimate);
  EXPECT_GE(rep.ci95_high, rep.estimate);
  EXPECT_TRUE(std::isfinite(rep.std_error));
  EXPECT_EQ(rep.samples, 5000u);
  EXPECT_EQ(rep.seed, 11u);
}

TEST(SampleEstimate, RademacherConsistentWithEnumeration) {
  const SquareMatrix a = permanent::generate({GeneratorKind::uniform_random, 4, 15});
  const double enumerated = permanent::rademacher_full_enumeration(a);
  const EstimateReport rep = permanent::sample_estimate(
      a, DistributionKind::rademacher, 500000, 31);
  EXPECT_LE(std::abs(rep.estimate - enumerated), 4.0 * rep.std_error);
}

TEST(VarianceProfile, OneRowPerKind) {
  const SquareMatrix ones3 = permanent::generate({GeneratorKind::ones, 3, 0});
  const auto rows = permanent::variance_profile(ones3, kAllKinds, 100000, 12);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_LE(std::abs(row.report.estimate - 6.0), 4.0 * row.report.std_error);
    // rows must come from distinct substreams of the profile seed
    EXPECT_NE(row.report.seed, 12u);
  }
  EXPECT_NE(rows[0].report.seed, rows[1].report.seed);

  const SquareMatrix zero3(3);
  const auto zero_rows = permanent::variance_profile(zero3, kAllKinds, 100, 1);
  for (const auto& row : zero_rows) {
    EXPECT_EQ(row.report.estimate, 0.0);
    EXPECT_EQ(row.report.std_error, 0.0);
  }

  const SquareMatrix id2 = permanent::generate({GeneratorKind::identity, 2, 0});
  const std::array<DistributionKind, 1> just_rademacher = {
      DistributionKind::rademacher};
  const auto rad_rows =
      permanent::variance_profile(id2, just_rademacher, 10000, 3);
  ASSERT_EQ(rad_rows.size(), 1u);
  EXPECT_LE(std::abs(rad_rows[0].report.estimate - 1.0),
            4.0 * rad_rows[0].report.std_error + 1e-12);
}

}  // namespace
