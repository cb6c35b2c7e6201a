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

#include "mobo/lbfgsb.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mobo/error.h"

namespace mobo::opt {
namespace {

double rosenbrock(const Vector& x, Vector& g) {
  double f = 0.0;
  g.setZero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
    g[i] += -400.0 * x[i] * a - 2.0 * b;
    g[i + 1] += 200.0 * a;
  }
  return f;
}

TEST(Lbfgsb, UnconstrainedRosenbrock) {
  Vector x0(2);
  x0 << -1.2, 1.0;
  const Vector lo = Vector::Constant(2, -10.0);
  const Vector hi = Vector::Constant(2, 10.0);
  LbfgsbResult r = lbfgsb_minimize(rosenbrock, x0, lo, hi);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
  EXPECT_LT(r.f, 1e-8);
  EXPECT_NE(r.status, LbfgsbStatus::kLineSearchFailed);
}

TEST(Lbfgsb, ExtendedRosenbrockWithActiveBound) {
  // Minimizer of the 10-d Rosenbrock restricted to x_0 <= 0.5 has x_0 = 0.5
  // on the bound, with a zero projected gradient there.
  Vector x0 = Vector::Constant(10, -1.0);
  Vector lo = Vector::Constant(10, -5.0);
  Vector hi = Vector::Constant(10, 5.0);
  hi[0] = 0.5;
  LbfgsbResult r = lbfgsb_minimize(rosenbrock, x0, lo, hi);
  EXPECT_DOUBLE_EQ(r.x[0], 0.5);
  Vector g;
  rosenbrock(r.x, g);
  EXPECT_LT(projected_gradient_norm(r.x, g, lo, hi), 1e-4);
  EXPECT_LT(g[0], 0.0);
}

TEST(Lbfgsb, SeparableQuadraticSolutionIsClippedTarget) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    Vector c(n), w(n);
    for (int i = 0; i < n; ++i) {
      c[i] = u(rng);
      w[i] = 0.5 + std::abs(u(rng));
    }
    auto f = [&](const Vector& x, Vector& g) {
      g = 2.0 * w.cwiseProduct(x - c);
      return (w.array() * (x - c).array().square()).sum();
    };
    const Vector lo = Vector::Constant(n, -1.0);
    const Vector hi = Vector::Constant(n, 1.0);
    LbfgsbResult r = lbfgsb_minimize(f, Vector::Zero(n), lo, hi);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.x[i], std::clamp(c[i], -1.0, 1.0), 1e-5);
  }
}

TEST(Lbfgsb, StartingPointIsProjected) {
  auto f = [](const Vector& x, Vector& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  Vector x0(2);
  x0 << 5.0, -5.0;
  const Vector lo = Vector::Constant(2, 1.0);
  const Vector hi = Vector::Constant(2, 2.0);
  LbfgsbResult r = lbfgsb_minimize(f, x0, lo, hi);
  EXPECT_DOUBLE_EQ(r.x[0], 1.0);
  EXPECT_DOUBLE_EQ(r.x[1], 1.0);
  EXPECT_EQ(r.status, LbfgsbStatus::kConverged);
}

TEST(Lbfgsb, EvaluationFailureAtStart) {
  auto f = [](const Vector&, Vector&) -> double { throw Error("boom"); };
  LbfgsbResult r = lbfgsb_minimize(f, Vector::Zero(1), Vector::Constant(1, -1.0),
                                   Vector::Constant(1, 1.0));
  EXPECT_EQ(r.status, LbfgsbStatus::kEvaluationFailed);
}

TEST(Lbfgsb, RespectsIterationCap) {
  LbfgsbOptions opt;
  opt.max_iterations = 3;
  Vector x0(2);
  x0 << -1.2, 1.0;
  LbfgsbResult r = lbfgsb_minimize(rosenbrock, x0, Vector::Constant(2, -10.0),
                                   Vector::Constant(2, 10.0), opt);
  EXPECT_LE(r.iterations, 3);
  EXPECT_EQ(r.status, LbfgsbStatus::kMaxIterations);
}

TEST(Lbfgsb, RejectsInconsistentBounds) {
  EXPECT_THROW(lbfgsb_minimize(rosenbrock, Vector::Zero(2), Vector::Constant(2, 1.0),
                               Vector::Constant(2, 0.0)),
               InvalidArgument);
  EXPECT_THROW(lbfgsb_minimize(rosenbrock, Vector::Zero(2), Vector::Constant(3, 0.0),
                               Vector::Constant(2, 1.0)),
               ShapeError);
}

TEST(Lbfgsb, ProjectedGradientNorm) {
  Vector x(3), g(3), lo(3), hi(3);
  x << 0.0, 1.0, 0.5;
  g << 2.0, -3.0, 0.25;
  lo << 0.0, 0.0, 0.0;
  hi << 1.0, 1.0, 1.0;
  // Components pushing outward at a bound are zeroed.
  EXPECT_DOUBLE_EQ(projected_gradient_norm(x, g, lo, hi), 0.25);
}

}  // namespace
}  // namespace mobo::opt
