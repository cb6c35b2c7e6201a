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

#include "mobo/acquisition.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mobo::acq {

namespace {

using ad::Expr;
using ad::GraphBuilder;

constexpr std::size_t kMaxJointPoints = 16;

void check_shapes(const gp::GpModel& model, std::size_t q, const AcqConfig& config,
                  std::size_t min_outputs) {
  if (q == 0) throw InvalidArgument("acquisition needs q >= 1");
  const std::size_t pending = static_cast<std::size_t>(config.pending.rows());
  if (pending > 0 && static_cast<std::size_t>(config.pending.cols()) != model.dim()) {
    throw ShapeError("pending points have the wrong dimension");
  }
  if (pending + q > kMaxJointPoints) {
    throw pareto::BatchTooLarge("joint batch of " + std::to_string(pending + q) +
                                " points exceeds maximum " + std::to_string(kMaxJointPoints));
  }
  if (config.base.n == 0) throw InvalidArgument("acquisition needs base samples");
  if (config.base.q != pending + q || config.base.outputs != model.num_outputs()) {
    throw ShapeError("base samples shaped " + std::to_string(config.base.q) + "x" +
                     std::to_string(config.base.outputs) + " but acquisition needs " +
                     std::to_string(pending + q) + "x" + std::to_string(model.num_outputs()));
  }
  if (model.num_outputs() < min_outputs) throw ShapeError("model has too few outputs");
  if (!(config.sigmoid_temperature > 0.0)) throw InvalidArgument("sigmoid temperature must be > 0");
}

struct Prepared {
  std::vector<Expr> x;
  std::vector<std::vector<Expr>> samples;  // [t][i * outputs + o]
  std::size_t points;
  std::size_t outputs;
};

Prepared prepare(GraphBuilder& b, const gp::GpModel& model, std::size_t q,
                 const AcqConfig& config) {
  Prepared p;
  p.x = b.inputs(q * model.dim());
  const Matrix pending = config.pending.rows() > 0 ? config.pending : Matrix(0, model.dim());
  gp::GraphPosterior post = gp::graph_posterior(model, b, p.x, pending);
  p.samples = gp::graph_samples(b, post, config.base);
  p.points = post.points;
  p.outputs = post.outputs;
  return p;
}

// Feasibility weight per sample and joint point: product over constraints of
// sigmoid(c / (eps * sd)).
std::vector<std::vector<Expr>> feasibility(GraphBuilder& b, const gp::GpModel& model,
                                           const Prepared& p, std::size_t first_constraint,
                                           double eps) {
  std::vector<std::vector<Expr>> w(p.samples.size(), std::vector<Expr>(p.points));
  for (std::size_t t = 0; t < p.samples.size(); ++t) {
    for (std::size_t i = 0; i < p.points; ++i) {
      std::vector<Expr> factors;
      for (std::size_t v = first_constraint; v < p.outputs; ++v) {
        const double scale = 1.0 / (eps * model.output(v).y_std);
        factors.push_back(b.sigmoid(p.samples[t][i * p.outputs + v] * scale));
      }
      Expr prod = factors.front();
      for (std::size_t k = 1; k < factors.size(); ++k) prod = prod * factors[k];
      w[t][i] = prod;
    }
  }
  return w;
}

Acquisition build_qehvi(const gp::GpModel& model, std::size_t q,
                        const pareto::BoxDecomposition& decomp, const AcqConfig& config,
                        bool constrained) {
  const std::size_t M = decomp.dim();
  check_shapes(model, q, config, constrained ? M + 1 : M);
  if (config.ref.size() > 0 && config.ref != decomp.front().ref()) {
    throw InvalidArgument("acquisition reference point differs from the decomposition's");
  }
  GraphBuilder b;
  Prepared p = prepare(b, model, q, config);
  const std::size_t pending = p.points - q;
  const std::vector<SubsetTerm> subsets = subset_table(pending, q);
  std::vector<std::vector<Expr>> feas;
  if (constrained) feas = feasibility(b, model, p, M, config.sigmoid_temperature);

  const Matrix& L = decomp.lowers();
  const Matrix& U = decomp.uppers();
  const auto K = L.rows();
  const double inv_n = 1.0 / static_cast<double>(p.samples.size());
  const std::size_t all = std::size_t{1} << p.points;

  std::vector<Expr> terms;
  std::vector<double> weights;
  // Subset minima and weights indexed by mask, built from mask minus its
  // lowest set bit.
  std::vector<std::vector<Expr>> mins(all, std::vector<Expr>(M));
  std::vector<Expr> wsub(all);
  std::vector<char> built(all, 0);
  std::vector<Expr> box_terms;
  std::vector<Expr> factors(M);
  for (std::size_t t = 0; t < p.samples.size(); ++t) {
    std::fill(built.begin(), built.end(), 0);
    auto subset_min = [&](auto&& self, std::uint32_t mask) -> void {
      if (built[mask]) return;
      const int low = std::countr_zero(mask);
      const std::uint32_t rest = mask & (mask - 1);
      for (std::size_t m = 0; m < M; ++m) {
        const Expr y = p.samples[t][static_cast<std::size_t>(low) * p.outputs + m];
        if (rest == 0) {
          mins[mask][m] = y;
        } else {
          self(self, rest);
          mins[mask][m] = b.minimum(std::vector<Expr>{mins[rest][m], y});
        }
      }
      if (constrained) {
        const Expr f = feas[t][static_cast<std::size_t>(low)];
        if (rest == 0) {
          wsub[mask] = f;
        } else {
          self(self, rest);
          wsub[mask] = wsub[rest] * f;
        }
      }
      built[mask] = 1;
    };
    for (const SubsetTerm& s : subsets) {
      subset_min(subset_min, s.mask);
      box_terms.clear();
      for (Eigen::Index k = 0; k < K; ++k) {
        for (std::size_t m = 0; m < M; ++m) {
          const auto mm = static_cast<Eigen::Index>(m);
          Expr z = mins[s.mask][m];
          if (std::isfinite(U(k, mm))) z = b.minimum(std::vector<Expr>{z, b.constant(U(k, mm))});
          factors[m] = b.clamp_zero(z - L(k, mm));
        }
        Expr vol = factors[0];
        for (std::size_t m = 1; m < M; ++m) vol = vol * factors[m];
        box_terms.push_back(vol);
      }
      Expr hv = box_terms.size() == 1 ? box_terms.front() : b.sum(box_terms);
      if (constrained) hv = hv * wsub[s.mask];
      terms.push_back(hv);
      weights.push_back(s.sign * inv_n);
    }
  }
  Expr out = b.matvec_row(weights, terms);
  return Acquisition(b.build(out), q, model.dim());
}

double normalized_range(const ScalarizationConfig& s, Eigen::Index k) {
  const double range = s.upper[k] - s.lower[k];
  return range > 0.0 ? range : 1.0;
}

}  // namespace

qmc::BaseSamples make_base_samples(std::size_t n, std::size_t pending, std::size_t q,
                                   std::size_t outputs, std::uint64_t seed,
                                   qmc::SampleKind kind) {
  return qmc::normal_base_samples(n, pending + q, outputs, seed, kind);
}

Vector sample_simplex(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw InvalidArgument("simplex dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  Vector w(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = e(rng);
  return w / w.sum();
}

double chebyshev_scalarize(std::span<const double> y, const ScalarizationConfig& s) {
  const auto m = static_cast<std::size_t>(s.weights.size());
  if (y.size() < m) throw ShapeError("scalarization needs one value per weight");
  const bool normalize = s.lower.size() > 0;
  double lo = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    double v = y[k];
    if (normalize) v = (v - s.lower[kk]) / normalized_range(s, kk);
    const double wv = s.weights[kk] * v;
    lo = std::min(lo, wv);
    sum += wv;
  }
  return lo + s.rho * sum;
}

double parego_incumbent(const Matrix& Y, std::size_t objectives, const ScalarizationConfig& s) {
  if (Y.rows() == 0) throw InvalidArgument("incumbent needs observations");
  double best_feasible = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const Vector row = Y.row(i).transpose();
    const double v = chebyshev_scalarize(std::span<const double>(row.data(), objectives), s);
    worst = std::min(worst, v);
    bool feasible = true;
    for (Eigen::Index c = static_cast<Eigen::Index>(objectives); c < Y.cols(); ++c) {
      feasible = feasible && row[c] >= 0.0;
    }
    if (feasible) {
      any = true;
      best_feasible = std::max(best_feasible, v);
    }
  }
  return any ? best_feasible : worst;
}

std::vector<SubsetTerm> subset_table(std::size_t pending, std::size_t q) {
  const std::size_t total = pending + q;
  if (total > 31) throw pareto::BatchTooLarge("subset table limited to 31 points");
  const std::uint32_t new_bits = ((std::uint32_t{1} << q) - 1) << pending;
  std::vector<SubsetTerm> out;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << total); ++mask) {
    if ((mask & new_bits) == 0) continue;
    out.push_back({mask, std::popcount(mask) % 2 == 1 ? 1 : -1});
  }
  return out;
}

Acquisition::Acquisition(ad::Graph graph, std::size_t q, std::size_t dim)
    : graph_(std::make_shared<const ad::Graph>(std::move(graph))), q_(q), dim_(dim) {}

double Acquisition::value(const Matrix& X) const {
  if (static_cast<std::size_t>(X.rows()) != q_ || static_cast<std::size_t>(X.cols()) != dim_) {
    throw ShapeError("candidate batch has the wrong shape");
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = X;
  return evaluate(std::span<const double>(r.data(), r.size()));
}

double Acquisition::value_and_gradient(const Matrix& X, Matrix& grad) const {
  if (static_cast<std::size_t>(X.rows()) != q_ || static_cast<std::size_t>(X.cols()) != dim_) {
    throw ShapeError("candidate batch has the wrong shape");
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = X;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> g(X.rows(), X.cols());
  ad::Workspace ws;
  const double v = evaluate(std::span<const double>(r.data(), r.size()),
                            std::span<double>(g.data(), g.size()), ws);
  grad = g;
  return v;
}

double Acquisition::evaluate(std::span<const double> x) const { return graph_->evaluate(x); }

double Acquisition::evaluate(std::span<const double> x, std::span<double> grad,
                             ad::Workspace& ws) const {
  return graph_->value_and_gradient(x, grad, ws);
}

Acquisition qehvi(const gp::GpModel& model, std::size_t q, const pareto::BoxDecomposition& decomp,
                  const AcqConfig& config) {
  return build_qehvi(model, q, decomp, config, false);
}

Acquisition qehvi_constrained(const gp::GpModel& model, std::size_t q,
                              const pareto::BoxDecomposition& decomp, const AcqConfig& config) {
  return build_qehvi(model, q, decomp, config, true);
}

Acquisition qparego(const gp::GpModel& model, const ScalarizationConfig& s,
                    const AcqConfig& config, double incumbent) {
  const auto M = static_cast<std::size_t>(s.weights.size());
  if (M == 0) throw InvalidArgument("scalarization needs weights");
  check_shapes(model, 1, config, M);
  if (!std::isfinite(incumbent)) throw InvalidArgument("incumbent must be finite");
  const bool normalize = s.lower.size() > 0;
  if (normalize && (static_cast<std::size_t>(s.lower.size()) != M ||
                    static_cast<std::size_t>(s.upper.size()) != M)) {
    throw ShapeError("normalization bounds need one entry per objective");
  }
  GraphBuilder b;
  Prepared p = prepare(b, model, 1, config);
  const bool constrained = p.outputs > M;
  std::vector<std::vector<Expr>> feas;
  if (constrained) feas = feasibility(b, model, p, M, config.sigmoid_temperature);
  const std::size_t pending = p.points - 1;
  const double inv_n = 1.0 / static_cast<double>(p.samples.size());

  std::vector<Expr> terms;
  std::vector<double> weights;
  std::vector<Expr> wy(M);
  for (std::size_t t = 0; t < p.samples.size(); ++t) {
    std::vector<Expr> gains(p.points);
    for (std::size_t i = 0; i < p.points; ++i) {
      for (std::size_t m = 0; m < M; ++m) {
        const auto mm = static_cast<Eigen::Index>(m);
        double w = s.weights[mm];
        double shift = 0.0;
        if (normalize) {
          w /= normalized_range(s, mm);
          shift = -s.lower[mm] * w;
        }
        wy[m] = p.samples[t][i * p.outputs + m] * w + shift;
      }
      Expr scal = b.minimum(wy) + b.sum(wy) * s.rho;
      Expr g = b.clamp_zero(scal - incumbent);
      if (constrained) g = g * feas[t][i];
      gains[i] = g;
    }
    terms.push_back(pending > 0 ? b.maximum(gains) : gains.front());
    weights.push_back(inv_n);
    if (pending > 0) {
      terms.push_back(b.maximum(std::span<const Expr>(gains).first(pending)));
      weights.push_back(-inv_n);
    }
  }
  Expr out = b.matvec_row(weights, terms);
  return Acquisition(b.build(out), 1, model.dim());
}

}  // namespace mobo::acq
