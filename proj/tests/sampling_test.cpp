// Copyright 2026 The mobo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mobo/sampling.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mobo::qmc {
namespace {

// First eight unscrambled Sobol points in five dimensions, from an independent
// implementation using the same Joe-Kuo direction numbers.
const double kReference[8][5] = {
    {0, 0, 0, 0, 0},
    {.5, .5, .5, .5, .5},
    {.75, .25, .25, .25, .75},
    {.25, .75, .75, .75, .25},
    {.375, .375, .625, .875, .375},
    {.875, .875, .125, .375, .875},
    {.625, .125, .875, .625, .625},
    {.125, .625, .375, .125, .125},
};

TEST(Sobol, UnscrambledMatchesReference) {
  Matrix pts = sobol(8, 5, 0, false);
  for (int i = 0; i < 8; ++i) {
    for (int d = 0; d < 5; ++d) EXPECT_EQ(pts(i, d), kReference[i][d]) << i << "," << d;
  }
  Matrix two = sobol(2, 1, 0, false);
  EXPECT_EQ(two(0, 0), 0.0);
  EXPECT_EQ(two(1, 0), 0.5);
}

TEST(Sobol, Deterministic) {
  EXPECT_EQ(sobol(16, 3, 42), sobol(16, 3, 42));
  EXPECT_NE(sobol(16, 3, 42), sobol(16, 3, 43));
}

TEST(Sobol, EngineContinuesSequence) {
  SobolEngine e(4, 9);
  Matrix a = e.draw(5);
  Matrix b = e.draw(11);
  Matrix all = sobol(16, 4, 9);
  EXPECT_EQ(all.topRows(5), a);
  EXPECT_EQ(all.bottomRows(11), b);
  EXPECT_EQ(e.position(), 16u);
}

TEST(Sobol, InUnitInterval) {
  Matrix pts = sobol(4096, 7, 3);
  EXPECT_GE(pts.minCoeff(), 0.0);
  EXPECT_LT(pts.maxCoeff(), 1.0);
}

TEST(Sobol, DimensionLimits) {
  EXPECT_EQ(max_sobol_dimension(), 21201u);
  EXPECT_NO_THROW(SobolEngine(21201, 1));
  EXPECT_THROW(SobolEngine(21202, 1), UnsupportedDimension);
  EXPECT_THROW(sobol(0, 2, 1), InvalidArgument);
}

TEST(Sobol, HighDimensionReferenceRow) {
  // Dimension 21201 uses the last table row; the first nonzero point in each
  // dimension is 1/2 and the unscrambled second point after that is 1/4 or 3/4.
  Matrix pts = sobol(3, 21201, 0, false);
  EXPECT_EQ(pts(1, 21200), 0.5);
  EXPECT_TRUE(pts(2, 21200) == 0.25 || pts(2, 21200) == 0.75);
}

TEST(Sobol, ScrambledMarginalsStratified) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int k : {4, 8, 10}) {
      const std::size_t n = std::size_t{1} << k;
      Matrix pts = sobol(n, 6, seed);
      for (int d = 0; d < 6; ++d) {
        std::vector<int> hits(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
          ++hits[static_cast<std::size_t>(std::floor(pts(i, d) * n))];
        }
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }))
            << "seed " << seed << " k " << k << " dim " << d;
      }
    }
  }
}

// Warnock's closed form for the squared L2 star discrepancy.
double l2_star_discrepancy(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  const int d = static_cast<int>(x.cols());
  double a = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) p *= 1.0 - x(i, k) * x(i, k);
    a += p;
  }
  double b = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      double p = 1.0;
      for (int k = 0; k < d; ++k) p *= 1.0 - std::max(x(i, k), x(j, k));
      b += p;
    }
  }
  return std::sqrt(std::pow(3.0, -d) - std::pow(2.0, 1 - d) / n * a + b / (n * n));
}

TEST(Sobol, LowerDiscrepancyThanPseudoRandom) {
  Matrix q = sobol(1024, 2, 5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix r(1024, 2);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = u(rng);
  EXPECT_LT(l2_star_discrepancy(q), l2_star_discrepancy(r));
}

TEST(Normal, InverseCdfMedianAndSymmetry) {
  EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
  for (double p : {1e-6, 0.01, 0.2, 0.4}) {
    EXPECT_NEAR(inverse_normal_cdf(p), -inverse_normal_cdf(1.0 - p), 1e-9);
  }
  EXPECT_THROW(inverse_normal_cdf(1.5), InvalidArgument);
}

TEST(Normal, InverseCdfRoundTrip) {
  for (double p = 1e-10; p < 1.0; p = p < 0.01 ? p * 3 : p + 0.013) {
    const double x = inverse_normal_cdf(p);
    EXPECT_NEAR(normal_cdf(x), p, 1e-9 * std::max(1.0, p)) << p;
  }
  // 0.975 quantile, tabulated.
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-9);
  EXPECT_NEAR(normal_cdf(1.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(BaseSamples, Moments) {
  for (SampleKind kind : {SampleKind::kQmcNormal, SampleKind::kIidNormal}) {
    BaseSamples b = normal_base_samples(4096, 1, 1, 17, kind);
    ASSERT_EQ(b.data.size(), 4096u);
    double mean = 0.0;
    for (double v : b.data) mean += v;
    mean /= 4096.0;
    double var = 0.0;
    for (double v : b.data) var += (v - mean) * (v - mean);
    var /= 4095.0;
    EXPECT_NEAR(mean, 0.0, 0.05);
    EXPECT_NEAR(var, 1.0, 0.05);
  }
}

TEST(BaseSamples, KolmogorovSmirnov) {
  BaseSamples b = normal_base_samples(4096, 1, 1, 23, SampleKind::kQmcNormal);
  std::vector<double> v = b.data;
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = 0.5 * std::erfc(-v[i] / std::sqrt(2.0));
    ks = std::max({ks, std::abs(c - i / n), std::abs(c - (i + 1) / n)});
  }
  EXPECT_LT(ks, 0.02);
}

TEST(BaseSamples, DeterministicAndShaped) {
  auto a = normal_base_samples(32, 3, 2, 5, SampleKind::kQmcNormal);
  auto b = normal_base_samples(32, 3, 2, 5, SampleKind::kQmcNormal);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.data.size(), 32u * 3 * 2);
  for (double v : a.data) EXPECT_TRUE(std::isfinite(v));
  auto c = normal_base_samples(32, 3, 2, 5, SampleKind::kIidNormal);
  EXPECT_NE(a.data, c.data);
  EXPECT_THROW(normal_base_samples(0, 1, 1, 1, SampleKind::kIidNormal), InvalidArgument);
}

TEST(BaseSamples, LeadingSlotsKeepValues) {
  auto a = normal_base_samples(8, 4, 3, 5, SampleKind::kQmcNormal);
  auto l = a.leading_slots(2);
  EXPECT_EQ(l.q, 2u);
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t o = 0; o < 3; ++o) EXPECT_EQ(l.at(t, i, o), a.at(t, i, o));
    }
  }
  EXPECT_THROW(a.leading_slots(5), ShapeError);
}

}  // namespace
}  // namespace mobo::qmc
