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

#include "mobo/optimize.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mobo::optim {
namespace {

// -||x - c||^2 over a q x d batch, maximized at c.
acq::Acquisition quadratic(std::size_t q, std::size_t d, double c) {
  ad::GraphBuilder b;
  auto x = b.inputs(q * d);
  std::vector<ad::Expr> terms;
  for (auto& e : x) {
    ad::Expr z = e - c;
    terms.push_back(z * z);
  }
  return acq::Acquisition(b.build(-b.sum(terms)), q, d);
}

acq::Acquisition constant(std::size_t q, std::size_t d) {
  ad::GraphBuilder b;
  auto x = b.inputs(q * d);
  return acq::Acquisition(b.build(b.sum(x) * 0.0 + 1.0), q, d);
}

TEST(InitialConditions, AllRawWhenEqualCounts) {
  OptConfig c;
  c.restarts = 8;
  c.raw_samples = 8;
  c.seed = 3;
  auto starts = generate_initial_conditions(quadratic(1, 2, 0.3), c);
  ASSERT_EQ(starts.size(), 8u);
  Matrix raw = qmc::sobol(8, 2, 3);
  for (int i = 0; i < 8; ++i) {
    bool found = false;
    for (const auto& s : starts) found = found || s == raw.row(i);
    EXPECT_TRUE(found) << i;
  }
}

TEST(InitialConditions, TiesKeepGenerationOrder) {
  OptConfig c;
  c.restarts = 5;
  c.raw_samples = 32;
  c.seed = 4;
  auto starts = generate_initial_conditions(constant(2, 3), c);
  Matrix raw = qmc::sobol(32, 6, 4);
  for (int r = 0; r < 5; ++r) {
    Matrix expected(2, 3);
    expected << raw.row(r).head(3), raw.row(r).tail(3);
    EXPECT_EQ(starts[r], expected);
  }
}

TEST(InitialConditions, BestRawIncluded) {
  OptConfig c;
  c.restarts = 3;
  c.raw_samples = 128;
  c.seed = 5;
  acq::Acquisition a = quadratic(1, 3, 0.71);
  auto starts = generate_initial_conditions(a, c);
  Matrix raw = qmc::sobol(128, 3, 5);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < raw.rows(); ++i) {
    if (a.value(raw.row(i)) > a.value(raw.row(best))) best = i;
  }
  EXPECT_EQ(starts[0], Matrix(raw.row(best)));
}

TEST(OptimizeJoint, ConcaveQuadratic) {
  OptConfig c;
  c.restarts = 4;
  c.raw_samples = 64;
  for (std::size_t d : {1u, 3u, 6u}) {
    OptResult r = optimize_joint(quadratic(1, d, 0.3), c);
    EXPECT_LE((r.X.array() - 0.3).abs().maxCoeff(), 1e-5);
    EXPECT_FALSE(r.degraded);
  }
}

TEST(OptimizeJoint, BoundaryMaximum) {
  OptConfig c;
  c.restarts = 2;
  c.raw_samples = 16;
  OptResult r = optimize_joint(quadratic(2, 2, 1.4), c);
  EXPECT_TRUE((r.X.array() == 1.0).all());
  c.bounds = Matrix(2, 2);
  c.bounds << -1.0, 0.5, 0.0, 2.0;
  OptResult s = optimize_joint(quadratic(1, 2, 1.4), c);
  EXPECT_EQ(s.X(0, 0), 0.5);
  EXPECT_NEAR(s.X(0, 1), 1.4, 1e-6);
}

TEST(OptimizeJoint, FiniteDifferenceModeAgreesAndCostsMore) {
  OptConfig c;
  c.restarts = 2;
  c.raw_samples = 16;
  OptResult exact = optimize_joint(quadratic(1, 3, 0.4), c);
  c.gradient = GradientMode::kCentralDifference;
  OptResult fd = optimize_joint(quadratic(1, 3, 0.4), c);
  EXPECT_LE((fd.X.array() - 0.4).abs().maxCoeff(), 1e-5);
  EXPECT_GT(fd.evaluations - 16, 3 * (exact.evaluations - 16));
}

TEST(OptimizeJoint, ProgressRecordsEachCall) {
  OptConfig c;
  c.restarts = 2;
  c.raw_samples = 16;
  for (GradientMode mode : {GradientMode::kExact, GradientMode::kCentralDifference}) {
    c.gradient = mode;
    OptResult r = optimize_joint(quadratic(1, 2, 0.4), c);
    for (const auto& rr : r.restarts) {
      ASSERT_FALSE(rr.progress.empty());
      EXPECT_EQ(rr.progress.front().first, 1u);
      EXPECT_EQ(rr.progress.back().first, rr.evaluations);
      EXPECT_EQ(rr.progress.front().second, rr.initial_value);
      for (std::size_t i = 1; i < rr.progress.size(); ++i) {
        EXPECT_GT(rr.progress[i].first, rr.progress[i - 1].first);
      }
    }
  }
}

TEST(OptimizeJoint, RejectsBadConfig) {
  OptConfig c;
  c.restarts = 10;
  c.raw_samples = 5;
  EXPECT_THROW(optimize_joint(quadratic(1, 1, 0.1), c), InvalidArgument);
  c.raw_samples = 20;
  c.bounds = Matrix(1, 2);
  c.bounds << 1.0, 0.0;
  EXPECT_THROW(optimize_joint(quadratic(1, 1, 0.1), c), InvalidArgument);
}

struct Instance {
  gp::GpModel model;
  pareto::BoxDecomposition decomp;
};

Instance make_setup(std::uint64_t seed, int n, int d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  gp::Dataset data;
  data.X.resize(n, d);
  for (Eigen::Index i = 0; i < data.X.size(); ++i) data.X.data()[i] = u(rng);
  data.Y.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = data.X.row(i).sum() / d;
    data.Y(i, 0) = std::sin(3 * a) + 0.3 * std::cos(5 * data.X(i, 0));
    data.Y(i, 1) = std::cos(2.5 * a) + 0.2 * std::sin(4 * data.X(i, d - 1));
  }
  gp::GpModel model = gp::fit(data);
  Vector ref = data.Y.colwise().minCoeff().transpose().array() - 0.2;
  return {model, pareto::box_decompose(pareto::ParetoFront(data.Y, ref))};
}

TEST(OptimizeJoint, BeatsDenseGridOnQehvi) {
  Instance s = make_setup(7, 8, 2);
  acq::AcqConfig ac;
  ac.base = acq::make_base_samples(64, 0, 1, 2, 11);
  acq::Acquisition a = acq::qehvi(s.model, 1, s.decomp, ac);
  double grid_max = 0.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      Matrix X(1, 2);
      X << i / 100.0, j / 100.0;
      grid_max = std::max(grid_max, a.value(X));
    }
  }
  OptResult r = optimize_joint(a, OptConfig{});
  EXPECT_GE(r.value, grid_max - 1e-12);
  EXPECT_NEAR(a.value(r.X), r.value, 1e-15);
}

TEST(OptimizeJoint, FeasibleMonotoneDeterministic) {
  Instance s = make_setup(8, 10, 3);
  acq::AcqConfig ac;
  ac.base = acq::make_base_samples(32, 0, 2, 2, 12);
  acq::Acquisition a = acq::qehvi(s.model, 2, s.decomp, ac);
  OptConfig c;
  c.restarts = 6;
  c.raw_samples = 128;
  c.seed = 9;
  OptResult r1 = optimize_joint(a, c);
  OptResult r2 = optimize_joint(a, c);
  EXPECT_EQ(r1.X, r2.X);
  EXPECT_EQ(r1.value, r2.value);
  EXPECT_GE(r1.X.minCoeff(), 0.0);
  EXPECT_LE(r1.X.maxCoeff(), 1.0);
  for (const auto& rr : r1.restarts) {
    EXPECT_GE(rr.value, rr.initial_value);
    EXPECT_GE(rr.X.minCoeff(), 0.0);
    EXPECT_LE(rr.X.maxCoeff(), 1.0);
  }
}

AcquisitionFamily qehvi_family(const Instance& s, std::size_t q, std::uint64_t seed) {
  const qmc::BaseSamples base = acq::make_base_samples(64, 0, q, 2, seed);
  return [&s, base](const Matrix& pending, std::size_t step) {
    acq::AcqConfig ac;
    ac.pending = pending;
    ac.base = base.leading_slots(step + 1);
    return acq::qehvi(s.model, 1, s.decomp, ac);
  };
}

TEST(SequentialGreedy, SingleStepEqualsJoint) {
  Instance s = make_setup(10, 8, 2);
  OptConfig c;
  c.restarts = 4;
  c.raw_samples = 64;
  c.seed = 5;
  OptResult g = optimize_sequential_greedy(qehvi_family(s, 1, 3), c, 1);
  acq::AcqConfig ac;
  ac.base = acq::make_base_samples(64, 0, 1, 2, 3);
  OptResult j = optimize_joint(acq::qehvi(s.model, 1, s.decomp, ac), c);
  EXPECT_EQ(g.X, j.X);
  EXPECT_EQ(g.value, j.value);
}

TEST(SequentialGreedy, MarginalsDecreaseAndSumToJointValue) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    Instance s = make_setup(seed, 8, 2);
    OptConfig c;
    c.restarts = 4;
    c.raw_samples = 64;
    OptResult g = optimize_sequential_greedy(qehvi_family(s, 3, seed), c, 3);
    ASSERT_EQ(g.marginal_values.size(), 3u);
    for (int i = 1; i < 3; ++i) EXPECT_LE(g.marginal_values[i], g.marginal_values[i - 1] + 1e-9);
    acq::AcqConfig ac;
    ac.base = acq::make_base_samples(64, 0, 3, 2, seed);
    const double joint = acq::qehvi(s.model, 3, s.decomp, ac).value(g.X);
    EXPECT_NEAR(joint, g.value, 1e-9 * std::max(1.0, joint));
  }
}

TEST(SequentialGreedy, WithinGreedyBoundOfJoint) {
  for (std::size_t q : {2u, 3u}) {
    Instance s = make_setup(20 + q, 8, 2);
    OptConfig c;
    c.restarts = 6;
    c.raw_samples = 256;
    OptResult g = optimize_sequential_greedy(qehvi_family(s, q, 4), c, q);
    acq::AcqConfig ac;
    ac.base = acq::make_base_samples(64, 0, q, 2, 4);
    OptResult j = optimize_joint(acq::qehvi(s.model, q, s.decomp, ac), c);
    EXPECT_GE(g.value, (1.0 - std::exp(-1.0)) * j.value);
  }
}

// Numeric qEHVI for a single candidate from posterior moments and N
// standard-normal draws.
double numeric_qehvi(const Instance& s, double x, const qmc::BaseSamples& base) {
  Matrix X(1, 1);
  X << x;
  gp::Posterior p = gp::posterior(s.model, X);
  Matrix S = gp::sample(p, base);
  double total = 0.0;
  for (Eigen::Index t = 0; t < S.rows(); ++t) {
    total += pareto::hvi_inclusion_exclusion(S.row(t), s.decomp);
  }
  return total / S.rows();
}

TEST(SampleAverageApproximation, ArgmaxConverges) {
  Instance s = make_setup(30, 6, 1);
  const auto ref_base = qmc::normal_base_samples(1 << 17, 1, 2, 99, qmc::SampleKind::kIidNormal);
  // Reference argmax: grid then golden-section refinement.
  double best_x = 0.0, best_v = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = numeric_qehvi(s, i / 200.0, ref_base);
    if (v > best_v) {
      best_v = v;
      best_x = i / 200.0;
    }
  }
  double lo = std::max(0.0, best_x - 0.005), hi = std::min(1.0, best_x + 0.005);
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 40; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (numeric_qehvi(s, a, ref_base) > numeric_qehvi(s, b, ref_base)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double x_ref = 0.5 * (lo + hi);
  std::vector<double> medians;
  for (std::size_t n : {16u, 64u, 256u, 1024u}) {
    std::vector<double> dist;
    for (int seed = 0; seed < 20; ++seed) {
      acq::AcqConfig ac;
      ac.base = acq::make_base_samples(n, 0, 1, 2, 500 + seed, qmc::SampleKind::kIidNormal);
      OptConfig c;
      c.restarts = 4;
      c.raw_samples = 64;
      OptResult r = optimize_joint(acq::qehvi(s.model, 1, s.decomp, ac), c);
      dist.push_back(std::abs(r.X(0, 0) - x_ref));
    }
    std::nth_element(dist.begin(), dist.begin() + 10, dist.end());
    medians.push_back(dist[10]);
  }
  for (std::size_t i = 1; i < medians.size(); ++i) {
    EXPECT_LT(medians[i], medians[i - 1]) << "N index " << i;
  }
}

}  // namespace
}  // namespace mobo::optim
