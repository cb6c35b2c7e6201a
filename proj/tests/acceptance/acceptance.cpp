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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion ids (T1 .. T11) as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mobo/acquisition.h"
#include "mobo/autodiff.h"
#include "mobo/gp.h"
#include "mobo/harness.h"
#include "mobo/optimize.h"
#include "mobo/pareto.h"
#include "mobo/sampling.h"

namespace {

using mobo::Matrix;
using mobo::Vector;
namespace acq = mobo::acq;
namespace ad = mobo::ad;
namespace gp = mobo::gp;
namespace harness = mobo::harness;
namespace optim = mobo::optim;
namespace pareto = mobo::pareto;
namespace qmc = mobo::qmc;

// Tolerances and limits.
constexpr double kT1Tol = 1e-9;
constexpr double kT1Seconds = 30;
constexpr double kT2StdErrs = 3.0;
constexpr double kT2Seconds = 60;
constexpr double kT3Seconds = 5;
constexpr double kT4Step = 1e-5;
constexpr double kT4Tol = 1e-4;
constexpr double kT4Seconds = 120;
constexpr double kT5Tol = 1e-3;
constexpr double kT5Seconds = 120;
constexpr double kT6Tol = 1e-12;
constexpr double kT6Seconds = 30;
constexpr double kT7Gap = 1e-6;
constexpr double kT7Ratio = 0.2;
constexpr double kT7Seconds = 300;
constexpr double kT8Tol = 1e-12;
constexpr double kT9Seconds = 1800;
constexpr double kT10Gap = 0.3;
constexpr double kT10Seconds = 1800;
constexpr double kT11Loose = 0.05;
constexpr double kT11Tight = 1e-3;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Matrix uniform(std::mt19937_64& rng, int n, int d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Points on the positive orthant of the unit sphere; mutually non-dominated.
Matrix sphere_front(std::mt19937_64& rng, int p, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix out(p, m);
  for (int i = 0; i < p; ++i) {
    Vector v(m);
    for (int k = 0; k < m; ++k) v[k] = std::abs(n(rng)) + 1e-3;
    out.row(i) = v.normalized().transpose();
  }
  return out;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), std::max(a.cols(), b.cols()));
  if (a.rows()) out.topRows(a.rows()) = a;
  if (b.rows()) out.bottomRows(b.rows()) = b;
  return out;
}

std::vector<double> row_major(const Matrix& X) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out.push_back(X(i, j));
  }
  return out;
}

// Cosine objectives on the unit cube; constraint columns are shifted down.
gp::Dataset make_data(std::uint64_t seed, int n, int d, int M, int V) {
  std::mt19937_64 rng(seed);
  gp::Dataset data;
  data.X = uniform(rng, n, d);
  data.Y.resize(n, M + V);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < M + V; ++o) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += std::cos(2.5 * data.X(i, k) + 1.3 * o + 0.4 * k);
      data.Y(i, o) = o < M ? s : s - 0.3;
    }
  }
  return data;
}

struct Instance {
  gp::GpModel model;
  pareto::BoxDecomposition decomp;
  pareto::ParetoFront front;
};

Instance make_instance(std::uint64_t seed, int n, int d, int M, int V, double zeta = 0.0) {
  gp::Dataset data = make_data(seed, n, d, M, V);
  gp::GpModel model = gp::fit(data);
  const Matrix Yobj = data.Y.leftCols(M);
  Vector ref = Yobj.colwise().minCoeff().transpose().array() - 0.1;
  std::vector<Eigen::Index> feas;
  for (Eigen::Index i = 0; i < data.Y.rows(); ++i) {
    if ((data.Y.row(i).tail(V).array() >= 0).all()) feas.push_back(i);
  }
  Matrix F(static_cast<Eigen::Index>(feas.size()), M);
  for (std::size_t i = 0; i < feas.size(); ++i) F.row(i) = Yobj.row(feas[i]);
  pareto::ParetoFront front(F, ref);
  return {model, pareto::box_decompose(front, zeta), front};
}

// Best of `tries` uniform batches by acquisition value.
Matrix promising(const acq::Acquisition& a, std::mt19937_64& rng, int tries) {
  Matrix best = uniform(rng, static_cast<int>(a.q()), static_cast<int>(a.dim()));
  double best_v = a.value(best);
  for (int t = 1; t < tries; ++t) {
    Matrix X = uniform(rng, static_cast<int>(a.q()), static_cast<int>(a.dim()));
    const double v = a.value(X);
    if (v > best_v) {
      best_v = v;
      best = X;
    }
  }
  return best;
}

Outcome t1() {
  Stopwatch sw;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> pick_m(2, 4), pick_q(1, 5), pick_p(0, 20);
  double worst = 0.0;
  for (int inst = 0; inst < 500; ++inst) {
    const int M = pick_m(rng);
    const int q = pick_q(rng);
    const int p = pick_p(rng);
    const Matrix P = sphere_front(rng, p, M);
    const Vector ref = Vector::Constant(M, -0.1);
    const Matrix Y = uniform(rng, q, M, -0.2, 1.1);
    const pareto::ParetoFront front(P, ref);
    const double ie = pareto::hvi_inclusion_exclusion(Y, pareto::box_decompose(front));
    const double diff = pareto::hypervolume(stack(P, Y), ref) - pareto::hypervolume(P, ref);
    worst = std::max(worst, std::abs(ie - diff));
  }
  const double t = sw.seconds();
  return {worst <= kT1Tol && t <= kT1Seconds,
          fmt("500 instances, max |HVI_ie - HV difference| = %.3g (tol %.0e), %.2f s (limit %.0f s)",
              worst, kT1Tol, t, kT1Seconds)};
}

Outcome t2() {
  Stopwatch sw;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> pick_m(2, 4), pick_p(1, 20);
  constexpr int kSamples = 1000000;
  int within = 0;
  double worst = 0.0, sum_sq = 0.0;
  for (int f = 0; f < 50; ++f) {
    const int M = pick_m(rng);
    const Matrix P = sphere_front(rng, pick_p(rng), M);
    const Vector ref = Vector::Constant(M, 0.0);
    const double exact = pareto::hypervolume(P, ref);
    const Vector hi = P.colwise().maxCoeff().transpose();
    double box = 1.0;
    for (int m = 0; m < M; ++m) box *= hi[m] - ref[m];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> z(M);
    long hits = 0;
    for (int s = 0; s < kSamples; ++s) {
      for (int m = 0; m < M; ++m) z[m] = ref[m] + u(rng) * (hi[m] - ref[m]);
      for (Eigen::Index i = 0; i < P.rows(); ++i) {
        bool dom = true;
        for (int m = 0; m < M && dom; ++m) dom = P(i, m) >= z[m];
        if (dom) {
          ++hits;
          break;
        }
      }
    }
    const double frac = static_cast<double>(hits) / kSamples;
    const double est = frac * box;
    const double se = box * std::sqrt(frac * (1.0 - frac) / kSamples);
    const double z_score = se > 0 ? std::abs(est - exact) / se : (est == exact ? 0.0 : INFINITY);
    worst = std::max(worst, z_score);
    sum_sq += z_score * z_score;
    if (z_score <= kT2StdErrs) ++within;
  }
  const double t = sw.seconds();
  return {within == 50 && t <= kT2Seconds,
          fmt("%d/50 fronts within %.0f MC standard errors (worst %.2f SE, mean squared %.2f), %.2f s "
              "(limit %.0f s)",
              within, kT2StdErrs, worst, sum_sq / 50, t, kT2Seconds)};
}

Outcome t3() {
  Stopwatch sw;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> pick_p(1, 50);
  int ok = 0;
  for (int f = 0; f < 100; ++f) {
    const Matrix P = sphere_front(rng, pick_p(rng), 2);
    const pareto::ParetoFront front(P, Vector::Constant(2, -0.5));
    if (pareto::box_decompose(front, 0.0).size() == front.size() + 1) ++ok;
  }
  const double t = sw.seconds();
  return {ok == 100 && t <= kT3Seconds,
          fmt("%d/100 fronts give K = |P| + 1, %.3f s (limit %.0f s)", ok, t, kT3Seconds)};
}

Outcome t4() {
  Stopwatch sw;
  std::mt19937_64 rng(404);
  double worst = 0.0;
  int checked = 0, skipped = 0, nonzero = 0;
  for (int c = 0; c < 50; ++c) {
    const int q = 1 + c % 3;
    const int M = 2 + (c / 3) % 2;
    const int d = 1 + (c / 2) % 4;
    const bool constrained = c % 2 == 1;
    const Instance inst = make_instance(4000 + c, 10, d, M, constrained ? 1 : 0);
    acq::AcqConfig cfg;
    cfg.base = acq::make_base_samples(32, 0, q, inst.model.num_outputs(), 40 + c);
    const acq::Acquisition a = constrained ? acq::qehvi_constrained(inst.model, q, inst.decomp, cfg)
                                           : acq::qehvi(inst.model, q, inst.decomp, cfg);
    const Matrix X = promising(a, rng, 16);
    const std::vector<double> in = row_major(X);
    Matrix grad;
    a.value_and_gradient(X, grad);
    for (Eigen::Index i = 0; i < grad.size(); ++i) nonzero += grad.data()[i] != 0.0;
    for (double e : ad::gradient_errors(a.graph(), in, kT4Step, true)) {
      if (std::isnan(e)) {
        ++skipped;
        continue;
      }
      ++checked;
      worst = std::max(worst, e);
    }
  }
  const double t = sw.seconds();
  return {worst <= kT4Tol && checked > 0 && t <= kT4Seconds,
          fmt("50 configurations, %d components checked (%d non-zero, %d at ties skipped), max "
              "relative error %.3g (tol %.0e), %.2f s (limit %.0f s)",
              checked, nonzero, skipped, worst, kT4Tol, t, kT4Seconds)};
}

// Two-objective HV of a point set by a sweep over the first coordinate.
double hv2(std::vector<std::pair<double, double>> pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double total = 0.0, top = r1;
  for (const auto& [a, b] : pts) {
    if (a <= r0 || b <= top) continue;
    total += (a - r0) * (b - top);
    top = b;
  }
  return total;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Integrates f over [-8, 8] split at the given breakpoints.
double integrate_pieces(const std::function<double(double)>& f, std::vector<double> cuts) {
  using boost::math::quadrature::gauss_kronrod;
  cuts.push_back(-8.0);
  cuts.push_back(8.0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::clamp(cuts[i], -8.0, 8.0);
    const double b = std::clamp(cuts[i + 1], -8.0, 8.0);
    if (b > a) total += gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-12);
  }
  return total;
}

Outcome t5() {
  Stopwatch sw;
  double worst = 0.0;
  std::size_t max_nodes = 0;
  for (int inst_i = 0; inst_i < 10; ++inst_i) {
    const Instance inst = make_instance(5000 + inst_i, 10, 2, 2, 0);
    acq::AcqConfig probe;
    probe.base = acq::make_base_samples(256, 0, 1, 2, 1);
    std::mt19937_64 rng(50 + inst_i);
    const Matrix X = promising(acq::qehvi(inst.model, 1, inst.decomp, probe), rng, 64);

    acq::AcqConfig cfg;
    cfg.base = acq::make_base_samples(1u << 16, 0, 1, 2, 500 + inst_i);
    double qmc_value = 0.0;
    {
      const acq::Acquisition a = acq::qehvi(inst.model, 1, inst.decomp, cfg);
      max_nodes = std::max(max_nodes, a.graph().node_count());
      qmc_value = a.value(X);
    }

    Matrix mean, var;
    inst.model.predict(X, mean, var);
    const double mu0 = mean(0, 0), mu1 = mean(0, 1);
    const double s0 = std::sqrt(var(0, 0)), s1 = std::sqrt(var(0, 1));
    const Matrix& P = inst.front.points();
    const Vector& r = inst.front.ref();
    std::vector<std::pair<double, double>> base;
    std::vector<double> cut0{(r[0] - mu0) / s0}, cut1{(r[1] - mu1) / s1};
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      base.emplace_back(P(i, 0), P(i, 1));
      cut0.push_back((P(i, 0) - mu0) / s0);
      cut1.push_back((P(i, 1) - mu1) / s1);
    }
    const double hv_base = hv2(base, r[0], r[1]);
    auto hvi = [&](double y0, double y1) {
      auto pts = base;
      pts.emplace_back(y0, y1);
      return hv2(std::move(pts), r[0], r[1]) - hv_base;
    };
    const double quad = integrate_pieces(
        [&](double z0) {
          const double y0 = mu0 + s0 * z0;
          return normal_pdf(z0) *
                 integrate_pieces([&](double z1) { return normal_pdf(z1) * hvi(y0, mu1 + s1 * z1); },
                                  cut1);
        },
        cut0);
    const double rel = std::abs(qmc_value - quad) / std::abs(quad);
    worst = std::max(worst, rel);
  }
  const double t = sw.seconds();
  return {worst <= kT5Tol && t <= kT5Seconds,
          fmt("10 GP instances, max relative error of N=2^16 QMC vs quadrature %.3g (tol %.0e), "
              "largest graph %zu nodes, %.2f s (limit %.0f s)",
              worst, kT5Tol, max_nodes, t, kT5Seconds)};
}

Outcome t6() {
  Stopwatch sw;
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> pick_m(2, 3), pick_v(1, 2), pick_q(1, 4), pick_p(0, 8);
  std::bernoulli_distribution coin(0.5);
  double worst_box = 0.0, worst_hv = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int M = pick_m(rng), V = pick_v(rng), q = pick_q(rng), p = pick_p(rng);
    const Matrix P = sphere_front(rng, p, M);
    const Vector ref = Vector::Constant(M, -0.1);
    const Matrix Y = uniform(rng, q, M, -0.2, 1.1);
    Matrix C(q, V);
    for (Eigen::Index i = 0; i < C.size(); ++i) {
      C.data()[i] = coin(rng) ? std::uniform_real_distribution<double>(0.0, 1.0)(rng)
                              : std::uniform_real_distribution<double>(-1.0, -1e-3)(rng);
    }
    const pareto::BoxDecomposition decomp = pareto::box_decompose(pareto::ParetoFront(P, ref));
    const double weighted = pareto::hvi_constrained_inclusion_exclusion(Y, C, decomp);

    Matrix Yaug(q, M + V);
    Yaug.leftCols(M) = Y;
    for (int i = 0; i < q; ++i) {
      for (int v = 0; v < V; ++v) Yaug(i, M + v) = C(i, v) >= 0 ? 1.0 : 0.0;
    }
    const double augmented = pareto::hvi_inclusion_exclusion(Yaug, decomp.with_unit_dimensions(V));

    Matrix Paug(p, M + V);
    if (p) {
      Paug.leftCols(M) = P;
      Paug.rightCols(V).setOnes();
    }
    Vector ref_aug = Vector::Zero(M + V);
    ref_aug.head(M) = ref;
    const double hv_diff =
        pareto::hypervolume(stack(Paug, Yaug), ref_aug) - pareto::hypervolume(Paug, ref_aug);
    worst_box = std::max(worst_box, std::abs(weighted - augmented));
    worst_hv = std::max(worst_hv, std::abs(weighted - hv_diff));
  }
  const double t = sw.seconds();
  return {worst_box <= kT6Tol && worst_hv <= kT6Tol && t <= kT6Seconds,
          fmt("200 instances, max |weighted - augmented HVI| = %.3g, max |weighted - augmented HV "
              "difference| = %.3g (tol %.0e), %.2f s (limit %.0f s)",
              worst_box, worst_hv, kT6Tol, t, kT6Seconds)};
}

Instance make_bo_setup(std::uint64_t seed, int n, int d) {
  std::mt19937_64 rng(seed);
  gp::Dataset data;
  data.X = uniform(rng, n, d);
  data.Y.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = data.X.row(i).sum() / d;
    data.Y(i, 0) = std::sin(3 * a) + 0.3 * std::cos(5 * data.X(i, 0));
    data.Y(i, 1) = std::cos(2.5 * a) + 0.2 * std::sin(4 * data.X(i, d - 1));
  }
  gp::GpModel model = gp::fit(data);
  Vector ref = data.Y.colwise().minCoeff().transpose().array() - 0.2;
  pareto::ParetoFront front(data.Y, ref);
  return {model, pareto::box_decompose(front), front};
}

// Evaluations a sequential multi-start run spends before its running value
// first reaches `target`; 0 if it never does.
std::size_t evaluations_to_reach(const optim::OptResult& r, double target) {
  std::size_t spent = 0;
  for (const auto& restart : r.restarts) {
    for (const auto& [evals, value] : restart.progress) {
      if (value >= target) return spent + evals;
    }
    spent += restart.evaluations;
  }
  return 0;
}

Outcome t7() {
  Stopwatch sw;
  std::size_t exact_reach = 0, fd_reach = 0, exact_total = 0, fd_total = 0;
  double worst_gap = -INFINITY;
  bool reached = true;
  std::string per;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance s = make_bo_setup(700 + seed, 8, 2);
    acq::AcqConfig ac;
    ac.base = acq::make_base_samples(128, 0, 1, 2, 70 + seed);
    const acq::Acquisition a = acq::qehvi(s.model, 1, s.decomp, ac);
    double grid_max = 0.0;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        Matrix X(1, 2);
        X << i / 100.0, j / 100.0;
        grid_max = std::max(grid_max, a.value(X));
      }
    }
    optim::OptConfig c;
    c.seed = seed;
    const std::vector<Matrix> starts = optim::generate_initial_conditions(a, c);
    const optim::OptResult exact = optim::optimize_from(a, starts, c);
    c.gradient = optim::GradientMode::kCentralDifference;
    const optim::OptResult fd = optim::optimize_from(a, starts, c);
    worst_gap = std::max({worst_gap, grid_max - exact.value, grid_max - fd.value});
    const std::size_t e = evaluations_to_reach(exact, grid_max - kT7Gap);
    const std::size_t f = evaluations_to_reach(fd, grid_max - kT7Gap);
    reached = reached && e > 0 && f > 0;
    exact_reach += e;
    fd_reach += f;
    exact_total += exact.evaluations;
    fd_total += fd.evaluations;
    per += fmt(" [%zu vs %zu]", e, f);
  }
  const double ratio = static_cast<double>(exact_reach) / static_cast<double>(fd_reach);
  const double total_ratio = static_cast<double>(exact_total) / static_cast<double>(fd_total);
  const double t = sw.seconds();
  return {reached && worst_gap <= kT7Gap && ratio <= kT7Ratio && t <= kT7Seconds,
          fmt("5 d=2 instances, worst final shortfall vs 101x101 grid max %.3g (tol %.0e); "
              "evaluations to reach grid max - %.0e exact/FD %zu/%zu = %.3f (limit %.2f), per "
              "instance%s; to convergence %zu/%zu = %.3f; %.1f s (limit %.0f s)",
              worst_gap, kT7Gap, kT7Gap, exact_reach, fd_reach, ratio, kT7Ratio, per.c_str(),
              exact_total, fd_total, total_ratio, t, kT7Seconds)};
}

optim::AcquisitionFamily qehvi_family(const Instance& s, std::size_t q, std::uint64_t seed) {
  const qmc::BaseSamples base = acq::make_base_samples(64, 0, q, 2, seed);
  return [&s, base](const Matrix& pending, std::size_t step) {
    acq::AcqConfig ac;
    ac.pending = pending;
    ac.base = base.leading_slots(step + 1);
    return acq::qehvi(s.model, 1, s.decomp, ac);
  };
}

Outcome t8() {
  Stopwatch sw;
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> pick_m(2, 4), pick_p(0, 10), pick_k(2, 5);
  int monotone = 0;
  double worst_rise = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int M = pick_m(rng), p = pick_p(rng), k = pick_k(rng);
    const Vector ref = Vector::Constant(M, -0.1);
    Matrix base = sphere_front(rng, p, M);
    const Matrix adds = uniform(rng, k, M, -0.2, 1.1);
    const Matrix z = uniform(rng, 1, M, 0.0, 1.1);
    double prev = INFINITY;
    bool ok = true;
    for (int i = 0; i <= k; ++i) {
      const double gain = pareto::hypervolume(stack(base, z), ref) - pareto::hypervolume(base, ref);
      if (gain > prev + kT8Tol) ok = false;
      if (std::isfinite(prev)) worst_rise = std::max(worst_rise, gain - prev);
      prev = gain;
      if (i < k) base = stack(base, adds.row(i));
    }
    monotone += ok;
  }

  int bound_ok = 0;
  double worst_ratio = INFINITY;
  for (int inst = 0; inst < 10; ++inst) {
    const std::size_t q = 2 + inst % 2;
    const Instance s = make_bo_setup(800 + inst, 8, 2);
    optim::OptConfig c;
    c.restarts = 10;
    c.raw_samples = 512;
    c.seed = inst;
    const optim::OptResult g = optim::optimize_sequential_greedy(qehvi_family(s, q, 80 + inst), c, q);
    acq::AcqConfig ac;
    ac.base = acq::make_base_samples(64, 0, q, 2, 80 + inst);
    const acq::Acquisition joint_acq = acq::qehvi(s.model, q, s.decomp, ac);
    const double greedy_value = joint_acq.value(g.X);
    const optim::OptResult j = optim::optimize_joint(joint_acq, c);
    const double ratio = greedy_value / j.value;
    worst_ratio = std::min(worst_ratio, ratio);
    if (greedy_value >= (1.0 - std::exp(-1.0)) * j.value) ++bound_ok;
  }
  const double t = sw.seconds();
  return {monotone == 200 && bound_ok == 10,
          fmt("marginal gains non-increasing on %d/200 instances (largest rise %.3g, tol %.0e); "
              "greedy >= (1 - 1/e) joint on %d/10 instances (smallest greedy/joint %.4f), %.1f s",
              monotone, worst_rise, kT8Tol, bound_ok, worst_ratio, t)};
}

struct MethodRuns {
  std::vector<double> qehvi, qparego, sobol;
};

MethodRuns run_methods(const std::string& problem, std::size_t budget) {
  MethodRuns out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    harness::ExperimentConfig c;
    c.problem = problem;
    c.budget = budget;
    c.seed = seed;
    c.method = harness::Method::kQehvi;
    out.qehvi.push_back(harness::run_bo(c).records.back().log_hv_diff);
    c.method = harness::Method::kQparego;
    out.qparego.push_back(harness::run_bo(c).records.back().log_hv_diff);
    c.method = harness::Method::kSobol;
    out.sobol.push_back(harness::run_bo(c).records.back().log_hv_diff);
  }
  return out;
}

Outcome t9() {
  Stopwatch sw;
  bool pass = true;
  std::string detail;
  for (const auto& [problem, budget] :
       std::vector<std::pair<std::string, std::size_t>>{{"branin_currin", 36}, {"c2_dtlz2", 66}}) {
    const MethodRuns r = run_methods(problem, budget);
    const double mq = median(r.qehvi), mp = median(r.qparego), ms = median(r.sobol);
    int wins = 0;
    for (int i = 0; i < 10; ++i) wins += r.qehvi[i] < r.sobol[i];
    pass = pass && mq < mp && mp < ms && wins >= 9;
    detail += fmt("%s medians qEHVI %.3f, qParEGO %.3f, Sobol %.3f, qEHVI beats Sobol %d/10; ",
                  problem.c_str(), mq, mp, ms, wins);
  }
  const double t = sw.seconds();
  return {pass && t <= kT9Seconds,
          detail + fmt("%.0f s (limit %.0f s)", t, kT9Seconds)};
}

Outcome t10() {
  Stopwatch sw;
  std::vector<double> single, batch;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    harness::ExperimentConfig c;
    c.problem = "branin_currin";
    c.budget = 38;
    c.seed = seed;
    single.push_back(harness::run_bo(c).records.back().log_hv_diff);
    c.q = 4;
    c.mode = harness::Mode::kSequentialGreedy;
    batch.push_back(harness::run_bo(c).records.back().log_hv_diff);
  }
  const double m1 = median(single), m4 = median(batch);
  const double t = sw.seconds();
  return {std::abs(m4 - m1) <= kT10Gap && t <= kT10Seconds,
          fmt("median final log HV difference q=1 %.3f, q=4 greedy %.3f, |gap| %.3f (limit %.1f), "
              "%.0f s (limit %.0f s)",
              m1, m4, std::abs(m4 - m1), kT10Gap, t, kT10Seconds)};
}

Outcome t11() {
  Stopwatch sw;
  double worst_loose = 0.0, worst_tight = 0.0;
  int values = 0;
  struct Shape {
    int M, n, d;
    std::size_t q, samples;
  };
  const std::vector<Shape> shapes{{3, 30, 3, 2, 64}, {3, 40, 4, 2, 64}, {4, 20, 3, 1, 32}};
  std::size_t largest = 0;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const Shape& sh = shapes[s];
    const Instance exact = make_instance(1100 + s, sh.n, sh.d, sh.M, 0);
    largest = std::max(largest, exact.decomp.size());
    acq::AcqConfig cfg;
    cfg.base = acq::make_base_samples(sh.samples, 0, sh.q, sh.M, 110 + s);
    const acq::Acquisition a0 = acq::qehvi(exact.model, sh.q, exact.decomp, cfg);
    const acq::Acquisition a3 =
        acq::qehvi(exact.model, sh.q, pareto::box_decompose(exact.front, 1e-3), cfg);
    const acq::Acquisition a5 =
        acq::qehvi(exact.model, sh.q, pareto::box_decompose(exact.front, 1e-5), cfg);
    std::mt19937_64 rng(11 + s);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix X = promising(a0, rng, 8);
      const double v0 = a0.value(X);
      worst_loose = std::max(worst_loose, std::abs(a3.value(X) - v0) / v0);
      worst_tight = std::max(worst_tight, std::abs(a5.value(X) - v0) / v0);
      ++values;
    }
  }

  std::mt19937_64 rng(1111);
  const pareto::ParetoFront front(sphere_front(rng, 30, 4), Vector::Constant(4, -0.1));
  auto time_decomp = [&](double zeta) {
    std::vector<double> t;
    for (int rep = 0; rep < 21; ++rep) {
      Stopwatch w;
      const auto d = pareto::box_decompose(front, zeta);
      t.push_back(w.seconds());
      if (d.size() == 0) std::abort();
    }
    return median(t);
  };
  const double t_exact = time_decomp(0.0);
  const double t_approx = time_decomp(1e-3);
  const std::size_t k_exact = pareto::box_decompose(front, 0.0).size();
  const std::size_t k_approx = pareto::box_decompose(front, 1e-3).size();
  const double t = sw.seconds();
  return {worst_loose <= kT11Loose && worst_tight <= kT11Tight && t_approx < t_exact,
          fmt("%d values on 3 instances (up to %zu exact boxes), max relative deviation zeta=1e-3 %.3g (tol %.2f), zeta=1e-5 %.3g (tol "
              "%.0e); M=4 |P|=30 decomposition median %.3g ms (%zu boxes) vs exact %.3g ms (%zu "
              "boxes), %.1f s",
              values, largest, worst_loose, kT11Loose, worst_tight, kT11Tight, t_approx * 1e3, k_approx,
              t_exact * 1e3, k_exact, t)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"T1", t1}, {"T2", t2}, {"T3", t3}, {"T4", t4},  {"T5", t5},   {"T6", t6},
      {"T7", t7}, {"T8", t8}, {"T9", t9}, {"T10", t10}, {"T11", t11},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-4s %s  %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
