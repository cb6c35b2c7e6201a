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

#include "mobo/problems.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>

#include "mobo/sampling.h"

namespace mobo::problems {

namespace detail {
// Generated from the fixture headers in data/fronts.
extern const std::vector<std::pair<std::string, double>> kFixtureHypervolumes;
}  // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;

Matrix box(std::size_t d, double lo, double hi) {
  Matrix b(static_cast<Eigen::Index>(d), 2);
  b.col(0).setConstant(lo);
  b.col(1).setConstant(hi);
  return b;
}

void check_dim(const Vector& x, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(x.size()) != d) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(d) + " inputs, got " +
                     std::to_string(x.size()));
  }
}

// Minimization hypervolume of a two-dimensional point cloud.
double hv2_min(std::vector<std::pair<double, double>> pts, double ref) {
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  double best = ref;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].first >= ref) break;
    best = std::min(best, pts[i].second);
    const double next = i + 1 < pts.size() ? std::min(pts[i + 1].first, ref) : ref;
    total += (next - pts[i].first) * (ref - best);
  }
  return total;
}

}  // namespace

Vector ProblemSpec::from_unit(const Vector& u) const {
  return bounds.col(0) + u.cwiseProduct(bounds.col(1) - bounds.col(0));
}

Vector ProblemSpec::to_unit(const Vector& x) const {
  return (x - bounds.col(0)).cwiseQuotient(bounds.col(1) - bounds.col(0));
}

double branin(double x1, double x2) {
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double u = x2 - b * x1 * x1 + c * x1 - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double currin(double x1, double x2) {
  const double factor = x2 > 0.0 ? 1.0 - std::exp(-1.0 / (2.0 * x2)) : 1.0;
  const double num = ((2300.0 * x1 + 1900.0) * x1 + 2092.0) * x1 + 60.0;
  const double den = ((100.0 * x1 + 500.0) * x1 + 4.0) * x1 + 20.0;
  return factor * num / den;
}

Vector branin_currin(const Vector& x) {
  check_dim(x, 2, "branin_currin");
  Vector f(2);
  f << branin(15.0 * x[0] - 5.0, 15.0 * x[1]), currin(x[0], x[1]);
  return f;
}

double branin_currin_disk(const Vector& x) {
  check_dim(x, 2, "branin_currin_disk");
  const double a = 15.0 * x[0] - 5.0 - 2.5;
  const double b = 15.0 * x[1] - 7.5;
  return 50.0 - a * a - b * b;
}

Vector dtlz2(const Vector& x, std::size_t M) {
  const auto d = static_cast<std::size_t>(x.size());
  if (M < 2 || M > d) throw InvalidArgument("dtlz2 needs 2 <= M <= d");
  double g = 0.0;
  for (std::size_t i = M - 1; i < d; ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
  Vector f = Vector::Constant(static_cast<Eigen::Index>(M), 1.0 + g);
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t cosines = M - 1 - m;
    for (std::size_t i = 0; i < cosines; ++i) f[m] *= std::cos(0.5 * kPi * x[i]);
    if (m > 0) f[m] *= std::sin(0.5 * kPi * x[cosines]);
  }
  return f;
}

double c2_constraint(const Vector& f, double r) {
  const auto M = f.size();
  const double r2 = r * r;
  const double sq = f.squaredNorm();
  double inner = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < M; ++i) {
    const double others = sq - f[i] * f[i];
    inner = std::min(inner, (f[i] - 1.0) * (f[i] - 1.0) + others - r2);
  }
  const double center = 1.0 / std::sqrt(static_cast<double>(M));
  const double middle = (f.array() - center).square().sum() - r2;
  return -std::min(inner, middle);
}

Vector vehicle_safety(const Vector& x) {
  check_dim(x, 5, "vehicle_safety");
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  Vector f(3);
  f[0] = 1640.2823 + 2.3573285 * x1 + 2.3220035 * x2 + 4.5688768 * x3 + 7.7213633 * x4 +
         4.4559504 * x5;
  f[1] = 6.5856 + 1.15 * x1 - 1.0427 * x2 + 0.9738 * x3 + 0.8364 * x4 - 0.3695 * x1 * x4 +
         0.0861 * x1 * x5 + 0.3628 * x2 * x4 + 0.1106 * x1 * x1 - 0.3437 * x3 * x3 +
         0.1764 * x4 * x4;
  f[2] = -0.0551 + 0.0181 * x1 + 0.1024 * x2 + 0.0421 * x3 - 0.0073 * x1 * x2 +
         0.024 * x2 * x3 - 0.0118 * x2 * x4 - 0.0204 * x3 * x4 - 0.008 * x3 * x5 -
         0.0241 * x2 * x2 + 0.0109 * x4 * x4;
  return f;
}

double dtlz2_true_hv(std::size_t M, double ref) {
  const double m = static_cast<double>(M);
  const double ball = std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
  return std::pow(ref, m) - ball / std::pow(2.0, m);
}

double c2_dtlz2_true_hv(double r, double ref) {
  // Every feasible objective vector is rho * (cos t, sin t) with rho >= 1, so
  // the feasible front lies on the unit arc or on the constraint circles.
  constexpr std::size_t n = 1u << 20;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(4 * n);
  auto keep = [&](double a, double b) {
    if (a < 0.0 || b < 0.0 || a * a + b * b < 1.0 - 1e-15) return;
    Vector f(2);
    f << a, b;
    if (c2_constraint(f, r) >= -1e-15) pts.emplace_back(a, b);
  };
  const double c = 1.0 / std::sqrt(2.0);
  const std::pair<double, double> centers[] = {{1.0, 0.0}, {0.0, 1.0}, {c, c}};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.5 * kPi * static_cast<double>(i) / (n - 1);
    keep(std::cos(t), std::sin(t));
    const double s = 2.0 * kPi * static_cast<double>(i) / n;
    for (const auto& [cx, cy] : centers) keep(cx + r * std::cos(s), cy + r * std::sin(s));
  }
  return hv2_min(std::move(pts), ref);
}

namespace {

ProblemSpec base(std::string name, std::size_t d, std::size_t M, std::size_t V, Matrix bounds,
                 Vector ref_min) {
  ProblemSpec p;
  p.name = std::move(name);
  p.d = d;
  p.M = M;
  p.V = V;
  p.bounds = std::move(bounds);
  p.ref_point = -ref_min;
  return p;
}

}  // namespace

ProblemSpec branin_currin_problem() {
  ProblemSpec p = base("branin_currin", 2, 2, 0, box(2, 0.0, 1.0), Vector{{18.0, 6.0}});
  p.evaluate = [](const Vector& x) { return Evaluation{-branin_currin(x), Vector(0)}; };
  p.true_front_hv = fixture_hypervolume(p.name);
  return p;
}

ProblemSpec constrained_branin_currin_problem() {
  ProblemSpec p =
      base("constrained_branin_currin", 2, 2, 1, box(2, 0.0, 1.0), Vector{{90.0, 10.0}});
  p.evaluate = [](const Vector& x) {
    return Evaluation{-branin_currin(x), Vector::Constant(1, branin_currin_disk(x))};
  };
  p.true_front_hv = fixture_hypervolume(p.name);
  return p;
}

ProblemSpec dtlz2_problem(std::size_t d, std::size_t M) {
  if (M < 2 || M > d) throw InvalidArgument("dtlz2 needs 2 <= M <= d");
  ProblemSpec p = base("dtlz2", d, M, 0, box(d, 0.0, 1.0),
                       Vector::Constant(static_cast<Eigen::Index>(M), 1.1));
  p.evaluate = [M](const Vector& x) { return Evaluation{-dtlz2(x, M), Vector(0)}; };
  p.true_front_hv = dtlz2_true_hv(M);
  return p;
}

ProblemSpec c2_dtlz2_problem(std::size_t d, std::size_t M, double r) {
  if (M < 2 || M > d) throw InvalidArgument("c2_dtlz2 needs 2 <= M <= d");
  ProblemSpec p = base("c2_dtlz2", d, M, 1, box(d, 0.0, 1.0),
                       Vector::Constant(static_cast<Eigen::Index>(M), 1.1));
  p.evaluate = [M, r](const Vector& x) {
    Vector f = dtlz2(x, M);
    return Evaluation{-f, Vector::Constant(1, c2_constraint(f, r))};
  };
  if (M == 2) {
    static const double hv = c2_dtlz2_true_hv(kC2Radius);
    p.true_front_hv = r == kC2Radius ? hv : c2_dtlz2_true_hv(r);
  }
  return p;
}

ProblemSpec vehicle_safety_problem() {
  ProblemSpec p = base("vehicle_safety", 5, 3, 0, box(5, 1.0, 3.0),
                       Vector{{1864.72022, 11.81993945, 0.2903999384}});
  p.evaluate = [](const Vector& x) { return Evaluation{-vehicle_safety(x), Vector(0)}; };
  p.true_front_hv = fixture_hypervolume(p.name);
  return p;
}

ProblemSpec make_problem(std::string_view name) {
  if (name == "branin_currin") return branin_currin_problem();
  if (name == "constrained_branin_currin") return constrained_branin_currin_problem();
  if (name == "dtlz2") return dtlz2_problem(6, 2);
  if (name == "dtlz2_m3") {
    ProblemSpec p = dtlz2_problem(6, 3);
    p.name = name;
    return p;
  }
  if (name == "dtlz2_m4") {
    ProblemSpec p = dtlz2_problem(6, 4);
    p.name = name;
    return p;
  }
  if (name == "c2_dtlz2") return c2_dtlz2_problem(12, 2);
  if (name == "vehicle_safety") return vehicle_safety_problem();
  throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() {
  return {"branin_currin", "constrained_branin_currin", "dtlz2", "dtlz2_m3",
          "dtlz2_m4",      "c2_dtlz2",                  "vehicle_safety"};
}

Vector objective_range(const ProblemSpec& problem, std::size_t count) {
  const Matrix u = qmc::sobol(count, problem.d, 0);
  Vector lo = Vector::Constant(static_cast<Eigen::Index>(problem.M),
                               std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Vector f = problem.evaluate(problem.from_unit(u.row(i).transpose())).objectives;
    lo = lo.cwiseMin(f);
    hi = hi.cwiseMax(f);
  }
  return hi - lo;
}

ProblemSpec with_noise(const ProblemSpec& problem, double relative_sd, std::uint64_t seed) {
  if (!(relative_sd >= 0.0)) throw InvalidArgument("relative_sd must be >= 0");
  ProblemSpec p = problem;
  if (relative_sd == 0.0) return p;
  const Vector sd = relative_sd * objective_range(problem);
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto inner = problem.evaluate;
  p.evaluate = [inner, sd, rng](const Vector& x) {
    Evaluation e = inner(x);
    for (Eigen::Index m = 0; m < e.objectives.size(); ++m) {
      const double u = (static_cast<double>((*rng)() >> 11) + 0.5) * 0x1.0p-53;
      e.objectives[m] += sd[m] * qmc::inverse_normal_cdf(u);
    }
    return e;
  };
  return p;
}

std::optional<double> fixture_hypervolume(std::string_view name) {
  for (const auto& [key, hv] : detail::kFixtureHypervolumes) {
    if (key == name) return hv;
  }
  return std::nullopt;
}

}  // namespace mobo::problems
