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

// Monte Carlo acquisition functions compiled to expression graphs over the
// flattened candidate batch: qEHVI, constrained qEHVI and qParEGO.

#ifndef MOBO_ACQUISITION_H_
#define MOBO_ACQUISITION_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mobo/autodiff.h"
#include "mobo/gp.h"
#include "mobo/pareto.h"
#include "mobo/sampling.h"
#include "mobo/types.h"

namespace mobo::acq {

struct AcqConfig {
  // Shaped N x (pending + q) x model outputs.
  qmc::BaseSamples base;
  Vector ref;
  // Applied on each constraint's standardized scale.
  double sigmoid_temperature = 1e-3;
  // Previously selected candidates, pending x d. Zero rows when unused.
  Matrix pending;
};

// Standard-normal base samples for a batch of `q` new candidates on top of
// `pending` previously selected ones.
qmc::BaseSamples make_base_samples(std::size_t n, std::size_t pending, std::size_t q,
                                   std::size_t outputs, std::uint64_t seed,
                                   qmc::SampleKind kind = qmc::SampleKind::kQmcNormal);

struct ScalarizationConfig {
  Vector weights;
  double rho = 0.05;
  // Optional per-objective normalization to [0, 1] before scalarizing; empty
  // vectors disable it.
  Vector lower;
  Vector upper;
};

// Weights drawn uniformly from the unit simplex.
Vector sample_simplex(std::size_t m, std::uint64_t seed);

// min_m w_m y_m + rho * sum_m w_m y_m on (optionally normalized) objectives.
double chebyshev_scalarize(std::span<const double> y, const ScalarizationConfig& s);

// Incumbent for qParEGO: best scalarized value among feasible rows of Y
// (first `objectives` columns objectives, the rest constraint slacks). With no
// feasible row, the worst scalarized value over all rows.
double parego_incumbent(const Matrix& Y, std::size_t objectives, const ScalarizationConfig& s);

// Subset `mask` over the joint points (pending first) and its inclusion-
// exclusion sign. With pending points only subsets containing a new point
// are listed.
struct SubsetTerm {
  std::uint32_t mask;
  int sign;
};
std::vector<SubsetTerm> subset_table(std::size_t pending, std::size_t q);

class Acquisition {
 public:
  Acquisition(ad::Graph graph, std::size_t q, std::size_t dim);

  std::size_t q() const { return q_; }
  std::size_t dim() const { return dim_; }
  std::size_t input_count() const { return q_ * dim_; }
  const ad::Graph& graph() const { return *graph_; }

  // Rows of X are candidates.
  double value(const Matrix& X) const;
  double value_and_gradient(const Matrix& X, Matrix& grad) const;

  double evaluate(std::span<const double> x) const;
  double evaluate(std::span<const double> x, std::span<double> grad, ad::Workspace& ws) const;

 private:
  std::shared_ptr<const ad::Graph> graph_;
  std::size_t q_;
  std::size_t dim_;
};

// qEHVI over the first decomp.dim() model outputs.
Acquisition qehvi(const gp::GpModel& model, std::size_t q, const pareto::BoxDecomposition& decomp,
                  const AcqConfig& config);

// Constrained qEHVI: model outputs after the first decomp.dim() are constraint
// slacks, feasible when >= 0. `decomp` should come from the feasible front.
Acquisition qehvi_constrained(const gp::GpModel& model, std::size_t q,
                              const pareto::BoxDecomposition& decomp, const AcqConfig& config);

// qParEGO expected improvement of the scalarized objective for one new
// candidate, weighted by the probability of feasibility when the model has
// more outputs than scalarization weights.
Acquisition qparego(const gp::GpModel& model, const ScalarizationConfig& s,
                    const AcqConfig& config, double incumbent);

}  // namespace mobo::acq

#endif  // MOBO_ACQUISITION_H_
