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

#include <cmath>
#include <vector>

#include "mobo/gp.h"

namespace mobo::gp {

namespace {

using ad::Expr;
using ad::GraphBuilder;

constexpr double kSqrt5 = 2.23606797749979;
constexpr double kPivotFloor = 1e-10;

// Matern-5/2 of a squared scaled distance, times `scale`.
Expr matern_expr(GraphBuilder& b, Expr r2, double scale) {
  Expr r = b.sqrt(b.maximum(std::vector<Expr>{r2, b.constant(1e-30)}));
  Expr a = r * kSqrt5;
  Expr poly = a + a * a * (1.0 / 3.0) + 1.0;
  return poly * b.exp(-a) * scale;
}

double matern(double r2) {
  const double a = kSqrt5 * std::sqrt(r2);
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

struct JointPoint {
  bool fixed = false;
  Vector scaled;             // fixed points
  std::vector<Expr> sexpr;   // candidates
  Expr sq_norm;              // candidates
};

}  // namespace

GraphPosterior graph_posterior(const GpModel& model, GraphBuilder& b, std::span<const Expr> x,
                               const Matrix& pending) {
  const std::size_t d = model.dim();
  if (d == 0 || x.size() % d != 0) throw ShapeError("candidate inputs must be a multiple of dim");
  if (pending.rows() > 0 && static_cast<std::size_t>(pending.cols()) != d) {
    throw ShapeError("pending points have the wrong dimension");
  }
  const std::size_t p = static_cast<std::size_t>(pending.rows());
  const std::size_t q = x.size() / d;
  const std::size_t Q = p + q;
  const std::size_t O = model.num_outputs();
  const Matrix& X = model.data().X;
  const Eigen::Index n = X.rows();

  GraphPosterior post;
  post.points = Q;
  post.outputs = O;
  post.mean.resize(Q * O);
  post.root.resize(O);

  for (std::size_t o = 0; o < O; ++o) {
    const OutputModel& m = model.output(o);
    const Eigen::ArrayXd inv = m.hyper.lengthscales.array().inverse();
    const double var0 = m.hyper.output_scale * m.y_std * m.y_std;
    const double kscale = m.hyper.output_scale;
    // Training inputs in lengthscale units.
    const Matrix T = (X.array().rowwise() * inv.transpose()).matrix();
    const Vector tt = T.rowwise().squaredNorm();
    const Matrix minus2T = -2.0 * T;
    const Vector alpha_w = m.alpha * m.y_std;
    const Matrix linv_w = m.chol_inv * m.y_std;

    std::vector<JointPoint> pts(Q);
    std::vector<std::vector<Expr>> v(Q);
    std::vector<Vector> vfixed(Q);
    std::vector<Expr> mean(Q);
    for (std::size_t i = 0; i < Q; ++i) {
      JointPoint& jp = pts[i];
      if (i < p) {
        jp.fixed = true;
        jp.scaled = (pending.row(static_cast<Eigen::Index>(i)).array() * inv.transpose()).transpose();
        Vector k(n);
        for (Eigen::Index t = 0; t < n; ++t) k[t] = kscale * matern((T.row(t).transpose() - jp.scaled).squaredNorm());
        vfixed[i] = linv_w * k;
        mean[i] = b.constant(alpha_w.dot(k) + m.y_mean);
        continue;
      }
      const std::size_t c = i - p;
      jp.sexpr.resize(d);
      for (std::size_t k = 0; k < d; ++k) jp.sexpr[k] = x[c * d + k] * inv[static_cast<Eigen::Index>(k)];
      jp.sq_norm = b.dot(jp.sexpr, jp.sexpr);
      const std::vector<Expr> cross = b.matvec(minus2T, jp.sexpr);
      std::vector<Expr> kvec(static_cast<std::size_t>(n));
      for (Eigen::Index t = 0; t < n; ++t) {
        kvec[static_cast<std::size_t>(t)] = matern_expr(b, jp.sq_norm + cross[static_cast<std::size_t>(t)] + tt[t], kscale);
      }
      const std::vector<double> aw(alpha_w.data(), alpha_w.data() + n);
      mean[i] = b.matvec_row(aw, kvec) + m.y_mean;
      v[i] = b.matvec(linv_w, kvec);
    }

    // Joint covariance, lower triangle.
    std::vector<std::vector<Expr>> C(Q);
    for (std::size_t i = 0; i < Q; ++i) {
      C[i].resize(i + 1);
      for (std::size_t j = 0; j <= i; ++j) {
        const JointPoint& a = pts[i];
        const JointPoint& c = pts[j];
        if (a.fixed && c.fixed) {
          const double kij = i == j ? 1.0 : matern((a.scaled - c.scaled).squaredNorm());
          C[i][j] = b.constant(var0 * kij - vfixed[i].dot(vfixed[j]));
          continue;
        }
        Expr prior;
        if (i == j) {
          prior = b.constant(var0);
        } else if (c.fixed) {
          const std::vector<double> w(c.scaled.data(), c.scaled.data() + d);
          std::vector<double> m2(d);
          for (std::size_t k = 0; k < d; ++k) m2[k] = -2.0 * w[k];
          prior = matern_expr(b, a.sq_norm + b.matvec_row(m2, a.sexpr) + c.scaled.squaredNorm(), var0);
        } else {
          std::vector<Expr> diff(d);
          for (std::size_t k = 0; k < d; ++k) diff[k] = a.sexpr[k] - c.sexpr[k];
          prior = matern_expr(b, b.dot(diff, diff), var0);
        }
        Expr reduction;
        if (c.fixed) {
          const std::vector<double> w(vfixed[j].data(), vfixed[j].data() + n);
          reduction = b.matvec_row(w, v[i]);
        } else {
          reduction = b.dot(v[i], v[j]);
        }
        C[i][j] = prior - reduction;
      }
    }

    // Cholesky in the graph.
    std::vector<Expr>& L = post.root[o];
    L.resize(Q * (Q + 1) / 2);
    auto at = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };
    const Expr floor = b.constant(kPivotFloor * var0);
    for (std::size_t j = 0; j < Q; ++j) {
      Expr diag = C[j][j];
      if (j > 0) {
        std::vector<Expr> row(L.begin() + static_cast<std::ptrdiff_t>(at(j, 0)),
                              L.begin() + static_cast<std::ptrdiff_t>(at(j, 0) + j));
        diag = diag - b.dot(row, row);
      }
      L[at(j, j)] = b.sqrt(b.maximum(std::vector<Expr>{diag, floor}));
      for (std::size_t i = j + 1; i < Q; ++i) {
        Expr num = C[i][j];
        if (j > 0) {
          std::vector<Expr> ri(L.begin() + static_cast<std::ptrdiff_t>(at(i, 0)),
                               L.begin() + static_cast<std::ptrdiff_t>(at(i, 0) + j));
          std::vector<Expr> rj(L.begin() + static_cast<std::ptrdiff_t>(at(j, 0)),
                               L.begin() + static_cast<std::ptrdiff_t>(at(j, 0) + j));
          num = num - b.dot(ri, rj);
        }
        L[at(i, j)] = num / L[at(j, j)];
      }
    }
    for (std::size_t i = 0; i < Q; ++i) post.mean[i * O + o] = mean[i];
  }
  return post;
}

std::vector<std::vector<Expr>> graph_samples(GraphBuilder& b, const GraphPosterior& post,
                                             const qmc::BaseSamples& base) {
  if (base.q != post.points || base.outputs != post.outputs) {
    throw ShapeError("base samples do not match the joint posterior shape");
  }
  const std::size_t Q = post.points;
  const std::size_t O = post.outputs;
  std::vector<std::vector<Expr>> out(base.n, std::vector<Expr>(Q * O));
  std::vector<double> w;
  std::vector<Expr> args;
  for (std::size_t t = 0; t < base.n; ++t) {
    for (std::size_t i = 0; i < Q; ++i) {
      for (std::size_t o = 0; o < O; ++o) {
        w.assign(1, 1.0);
        args.assign(1, post.mean[i * O + o]);
        for (std::size_t j = 0; j <= i; ++j) {
          w.push_back(base.at(t, j, o));
          args.push_back(post.root[o][i * (i + 1) / 2 + j]);
        }
        out[t][i * O + o] = b.matvec_row(w, args);
      }
    }
  }
  return out;
}

}  // namespace mobo::gp
