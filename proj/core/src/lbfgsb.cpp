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

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include "mobo/error.h"

namespace mobo::opt {

std::string_view to_string(LbfgsbStatus status) {
  switch (status) {
    case LbfgsbStatus::kConverged: return "converged";
    case LbfgsbStatus::kFunctionTolerance: return "function-tolerance";
    case LbfgsbStatus::kMaxIterations: return "max-iterations";
    case LbfgsbStatus::kLineSearchFailed: return "line-search-failed";
    case LbfgsbStatus::kEvaluationFailed: return "evaluation-failed";
  }
  return "unknown";
}

double projected_gradient_norm(const Vector& x, const Vector& g, const Vector& lower,
                               const Vector& upper) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i];
    norm = std::max(norm, std::abs(p));
  }
  return norm;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compact representation B = theta I - W M W^T of the limited-memory matrix.
struct CompactModel {
  double theta = 1.0;
  Matrix W;  // n x 2m
  Matrix M;  // 2m x 2m

  int cols() const { return static_cast<int>(W.cols()); }

  void rebuild(const std::deque<Vector>& s, const std::deque<Vector>& y, double th, int n) {
    theta = th;
    const int m = static_cast<int>(s.size());
    W.resize(n, 2 * m);
    if (m == 0) {
      M.resize(0, 0);
      return;
    }
    Matrix S(n, m), Y(n, m);
    for (int j = 0; j < m; ++j) {
      S.col(j) = s[j];
      Y.col(j) = y[j];
    }
    W.leftCols(m) = Y;
    W.rightCols(m) = theta * S;
    const Matrix SY = S.transpose() * Y;
    Matrix inner = Matrix::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
      inner(i, i) = -SY(i, i);
      for (int j = 0; j < i; ++j) {
        inner(m + i, j) = SY(i, j);  // L
        inner(j, m + i) = SY(i, j);  // L^T
      }
    }
    inner.bottomRightCorner(m, m) = theta * (S.transpose() * S);
    M = inner.inverse();
  }
};

struct Cauchy {
  Vector xcp;
  Vector c;  // W^T (xcp - x)
};

Cauchy generalized_cauchy_point(const Vector& x, const Vector& g, const Vector& lower,
                                const Vector& upper, const CompactModel& model) {
  const Eigen::Index n = x.size();
  const int cols = model.cols();
  Vector t(n), d(n);
  std::vector<Eigen::Index> order;
  order.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g[i] < 0.0) {
      t[i] = upper[i] == kInf ? kInf : (x[i] - upper[i]) / g[i];
    } else if (g[i] > 0.0) {
      t[i] = lower[i] == -kInf ? kInf : (x[i] - lower[i]) / g[i];
    } else {
      t[i] = kInf;
    }
    d[i] = t[i] == 0.0 ? 0.0 : -g[i];
    if (t[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&t](Eigen::Index a, Eigen::Index b) { return t[a] < t[b]; });

  Cauchy out{x, Vector::Zero(cols)};
  Vector p = cols > 0 ? Vector(model.W.transpose() * d) : Vector::Zero(0);
  double fp = -d.squaredNorm();
  if (fp >= 0.0) return out;
  double fpp = -model.theta * fp;
  if (cols > 0) fpp -= p.dot(model.M * p);
  const double fpp0 = -model.theta * fp;
  double dt_min = -fp / fpp;
  double t_old = 0.0;
  std::size_t k = 0;
  for (; k < order.size(); ++k) {
    const Eigen::Index b = order[k];
    const double tb = t[b];
    if (tb == kInf) break;
    const double dt = tb - t_old;
    if (dt_min < dt) break;
    out.xcp[b] = d[b] > 0.0 ? upper[b] : lower[b];
    const double zb = out.xcp[b] - x[b];
    const double gb = g[b];
    if (cols > 0) {
      out.c += dt * p;
      const Vector wb = model.W.row(b).transpose();
      const Vector Mc = model.M * out.c;
      const Vector Mp = model.M * p;
      const Vector Mw = model.M * wb;
      fp += dt * fpp + gb * gb + model.theta * gb * zb - gb * wb.dot(Mc);
      fpp += -model.theta * gb * gb - 2.0 * gb * wb.dot(Mp) - gb * gb * wb.dot(Mw);
      p += gb * wb;
    } else {
      fp += dt * fpp + gb * gb + model.theta * gb * zb;
      fpp += -model.theta * gb * gb;
    }
    fpp = std::max(fpp, std::numeric_limits<double>::epsilon() * fpp0);
    d[b] = 0.0;
    dt_min = -fp / fpp;
    t_old = tb;
  }
  dt_min = std::max(dt_min, 0.0);
  t_old += dt_min;
  for (; k < order.size(); ++k) {
    const Eigen::Index i = order[k];
    out.xcp[i] = std::clamp(x[i] + t_old * d[i], lower[i], upper[i]);
  }
  if (cols > 0) out.c += dt_min * p;
  return out;
}

Vector subspace_minimum(const Vector& x, const Vector& g, const Vector& lower,
                        const Vector& upper, const CompactModel& model, const Cauchy& cp) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cp.xcp[i] > lower[i] && cp.xcp[i] < upper[i]) free.push_back(i);
  }
  if (free.empty()) return cp.xcp;
  const auto nf = static_cast<Eigen::Index>(free.size());
  const int cols = model.cols();
  const double theta = model.theta;

  Vector r(nf);
  Vector wmc = cols > 0 ? Vector(model.W * (model.M * cp.c)) : Vector::Zero(n);
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[k];
    r[k] = g[i] + theta * (cp.xcp[i] - x[i]) - wmc[i];
  }
  Vector du(nf);
  if (cols == 0) {
    du = -r / theta;
  } else {
    Matrix WZ(nf, cols);
    for (Eigen::Index k = 0; k < nf; ++k) WZ.row(k) = model.W.row(free[k]);
    Vector v = model.M * (WZ.transpose() * r);
    const Matrix N = Matrix::Identity(cols, cols) - (model.M * (WZ.transpose() * WZ)) / theta;
    v = N.partialPivLu().solve(v);
    du = -r / theta - (WZ * v) / (theta * theta);
  }
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[k];
    if (du[k] > 0.0 && upper[i] < kInf) {
      alpha = std::min(alpha, (upper[i] - cp.xcp[i]) / du[k]);
    } else if (du[k] < 0.0 && lower[i] > -kInf) {
      alpha = std::min(alpha, (lower[i] - cp.xcp[i]) / du[k]);
    }
  }
  alpha = std::max(alpha, 0.0);
  Vector xbar = cp.xcp;
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[k];
    xbar[i] = std::clamp(cp.xcp[i] + alpha * du[k], lower[i], upper[i]);
  }
  return xbar;
}

struct Trial {
  double alpha = 0.0;
  double f = kInf;
  double slope = 0.0;
  Vector x;
  Vector g;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const Vector& x, const Vector& d, const Vector& lower,
             const Vector& upper, double f0, double slope0, const LbfgsbOptions& opt,
             int& evaluations)
      : f_(f), x_(x), d_(d), lower_(lower), upper_(upper), f0_(f0), slope0_(slope0), opt_(opt),
        evaluations_(evaluations) {}

  // Returns true and fills `best` when a point satisfying sufficient decrease
  // (and ideally the curvature condition) was found.
  bool run(double alpha0, double alpha_max, Trial& best) {
    Trial prev;
    prev.alpha = 0.0;
    prev.f = f0_;
    prev.slope = slope0_;
    double alpha = std::min(alpha0, alpha_max);
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Trial cur = evaluate(alpha);
      if (cur.f > f0_ + opt_.c1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur, best);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
        best = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, best);
      if (alpha >= alpha_max) {
        best = std::move(cur);
        return true;
      }
      prev = std::move(cur);
      alpha = std::min(4.0 * alpha, alpha_max);
    }
    if (prev.alpha > 0.0) {
      best = std::move(prev);
      return true;
    }
    return false;
  }

 private:
  Trial evaluate(double alpha) {
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * d_;
    for (Eigen::Index i = 0; i < t.x.size(); ++i) t.x[i] = std::clamp(t.x[i], lower_[i], upper_[i]);
    t.g = Vector::Zero(x_.size());
    ++evaluations_;
    try {
      t.f = f_(t.x, t.g);
      if (!std::isfinite(t.f) || !t.g.allFinite()) t.f = kInf;
    } catch (const Error&) {
      t.f = kInf;
    }
    t.slope = std::isfinite(t.f) ? t.g.dot(d_) : 0.0;
    return t;
  }

  bool zoom(Trial lo, Trial hi, Trial& best) {
    for (int i = 0; i < opt_.max_line_search; ++i) {
      const double a_lo = lo.alpha, a_hi = hi.alpha;
      const double left = std::min(a_lo, a_hi), right = std::max(a_lo, a_hi);
      const double width = right - left;
      if (width <= 1e-16 * std::max(1.0, right)) break;
      double alpha = 0.5 * (a_lo + a_hi);
      if (std::isfinite(hi.f)) {
        // Cubic interpolation through (lo, hi) with derivative information.
        const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a_lo - a_hi);
        const double disc = d1 * d1 - lo.slope * hi.slope;
        if (disc >= 0.0) {
          const double d2 = std::copysign(std::sqrt(disc), a_hi - a_lo);
          const double cand =
              a_hi - (a_hi - a_lo) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
          if (std::isfinite(cand)) alpha = cand;
        }
      }
      alpha = std::clamp(alpha, left + 0.1 * width, right - 0.1 * width);
      Trial cur = evaluate(alpha);
      if (cur.f > f0_ + opt_.c1 * alpha * slope0_ || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
          best = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    if (lo.alpha > 0.0 && lo.f < f0_) {
      best = std::move(lo);
      return true;
    }
    return false;
  }

  const Objective& f_;
  const Vector& x_;
  const Vector& d_;
  const Vector& lower_;
  const Vector& upper_;
  double f0_;
  double slope0_;
  const LbfgsbOptions& opt_;
  int& evaluations_;
};

}  // namespace

LbfgsbResult lbfgsb_minimize(const Objective& f, const Vector& x0, const Vector& lower,
                             const Vector& upper, const LbfgsbOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw ShapeError("lbfgsb: bound length mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidArgument("lbfgsb: lower bound exceeds upper bound");
  }
  LbfgsbResult result;
  result.x = x0;
  for (Eigen::Index i = 0; i < n; ++i) result.x[i] = std::clamp(x0[i], lower[i], upper[i]);
  Vector g = Vector::Zero(n);
  result.evaluations = 1;
  try {
    result.f = f(result.x, g);
  } catch (const Error&) {
    result.status = LbfgsbStatus::kEvaluationFailed;
    result.f = kInf;
    return result;
  }
  if (!std::isfinite(result.f) || !g.allFinite()) {
    result.status = LbfgsbStatus::kEvaluationFailed;
    return result;
  }

  std::deque<Vector> s_hist, y_hist;
  double theta = 1.0;
  CompactModel model;
  Vector& x = result.x;
  result.status = LbfgsbStatus::kMaxIterations;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (projected_gradient_norm(x, g, lower, upper) <= options.pgtol) {
      result.status = LbfgsbStatus::kConverged;
      break;
    }
    Trial accepted;
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      model.rebuild(s_hist, y_hist, theta, static_cast<int>(n));
      const Cauchy cp = generalized_cauchy_point(x, g, lower, upper, model);
      const Vector xbar = subspace_minimum(x, g, lower, upper, model, cp);
      const Vector d = xbar - x;
      const double slope = g.dot(d);
      const double dnorm = d.norm();
      if (dnorm > 0.0 && slope < 0.0) {
        double alpha_max = 1e10;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (d[i] > 0.0 && upper[i] < kInf) alpha_max = std::min(alpha_max, (upper[i] - x[i]) / d[i]);
          if (d[i] < 0.0 && lower[i] > -kInf) alpha_max = std::min(alpha_max, (lower[i] - x[i]) / d[i]);
        }
        alpha_max = std::max(alpha_max, 1.0);
        const double alpha0 = s_hist.empty() ? std::min(1.0 / dnorm, alpha_max) : 1.0;
        LineSearch ls(f, x, d, lower, upper, result.f, slope, options, result.evaluations);
        ok = ls.run(alpha0, alpha_max, accepted);
      }
      if (!ok) {
        if (s_hist.empty()) break;
        s_hist.clear();
        y_hist.clear();
        theta = 1.0;
      }
    }
    if (!ok) {
      result.status = LbfgsbStatus::kLineSearchFailed;
      break;
    }
    result.iterations = iter + 1;
    const Vector s = accepted.x - x;
    const Vector y = accepted.g - g;
    const double f_old = result.f;
    x = accepted.x;
    g = accepted.g;
    result.f = accepted.f;
    const double sy = s.dot(y);
    const double yy = y.squaredNorm();
    if (sy > std::numeric_limits<double>::epsilon() * yy) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
      theta = yy / sy;
    }
    const double reduction = (f_old - result.f) / std::max({std::abs(f_old), std::abs(result.f), 1.0});
    if (reduction <= options.ftol) {
      result.status = LbfgsbStatus::kFunctionTolerance;
      break;
    }
  }
  return result;
}

}  // namespace mobo::opt
