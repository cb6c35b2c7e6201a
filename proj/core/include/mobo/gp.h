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

// Independent-output Gaussian process surrogate: Matern-5/2 ARD kernel, MAP
// hyperparameters, joint posteriors over candidate batches, and expression
// graph builders for reparameterized posterior samples.

#ifndef MOBO_GP_H_
#define MOBO_GP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mobo/autodiff.h"
#include "mobo/error.h"
#include "mobo/sampling.h"
#include "mobo/types.h"

namespace mobo::gp {

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Inputs live in the unit cube; columns of Y are objectives then constraint
// slacks.
struct Dataset {
  Matrix X;
  Matrix Y;
};

// Throws InvalidArgument on empty, non-finite, mismatched or duplicated rows.
void validate(const Dataset& data);

double kernel_matern52(std::span<const double> x, std::span<const double> x2,
                       std::span<const double> lengthscales, double output_scale);

struct Hyperparameters {
  Vector lengthscales;
  double output_scale = 1.0;
  double noise_variance = 1e-4;
};

struct FitConfig {
  int restarts = 5;
  std::uint64_t seed = 0;
  double lengthscale_min = 1e-3;
  double lengthscale_max = 1e3;
  double output_scale_min = 1e-2;
  double output_scale_max = 1e2;
  double noise_min = 1e-6;
  double noise_max = 1.0;
  double lengthscale_log_sd = 1.7320508075688772;  // sqrt(3)
  double output_scale_log_sd = 1.5;
  int max_iterations = 200;
};

// Packed log-space parameter vector: log lengthscales, log output scale,
// log noise variance.
Vector pack(const Hyperparameters& h);
Hyperparameters unpack(std::span<const double> theta);

// Log marginal likelihood of standardized targets y at X.
double log_marginal_likelihood(const Matrix& X, const Vector& y, const Hyperparameters& h);

// Negative log posterior (negative log marginal likelihood minus log prior) in
// packed coordinates, with its gradient when `grad` is non-null.
double negative_log_posterior(const Matrix& X, const Vector& y, const Vector& theta,
                              const FitConfig& config, Vector* grad);

struct FitDiagnostics {
  std::vector<double> start_objectives;  // negative log posterior per restart start
  std::vector<double> end_objectives;
  double objective = 0.0;  // best end objective
  bool skipped = false;    // constant column
};

struct OutputModel {
  Hyperparameters hyper;
  double y_mean = 0.0;
  double y_std = 1.0;
  Matrix chol;    // lower factor of K + noise I (standardized scale)
  Matrix chol_inv;  // its inverse
  Vector alpha;   // (K + noise I)^{-1} y_standardized
  FitDiagnostics diagnostics;
};

struct Posterior {
  std::size_t q = 0;
  std::size_t outputs = 0;
  Vector mean;        // index i * outputs + o
  Matrix covariance;  // same ordering
  Matrix root;        // lower triangular, root * root^T ~ covariance
  bool jitter_warning = false;
};

class GpModel {
 public:
  GpModel() = default;
  GpModel(Dataset data, std::vector<OutputModel> outputs, bool jitter_warning = false);

  const Dataset& data() const { return data_; }
  std::size_t dim() const { return static_cast<std::size_t>(data_.X.cols()); }
  std::size_t num_outputs() const { return outputs_.size(); }
  std::size_t num_train() const { return static_cast<std::size_t>(data_.X.rows()); }
  const OutputModel& output(std::size_t o) const { return outputs_.at(o); }
  bool jitter_warning() const { return jitter_warning_; }

  // Latent posterior mean and variance per point (rows) and output (columns).
  void predict(const Matrix& Xcand, Matrix& mean, Matrix& variance) const;

 private:
  Dataset data_;
  std::vector<OutputModel> outputs_;
  bool jitter_warning_ = false;
};

GpModel fit(const Dataset& data, const FitConfig& config = {});

// Rebuilds the training caches for fixed hyperparameters.
GpModel condition(const Dataset& data, const std::vector<Hyperparameters>& hypers);

Posterior posterior(const GpModel& model, const Matrix& Xcand);

// N x (q * outputs) samples, row t is mean + root * base[t].
Matrix sample(const Posterior& post, const qmc::BaseSamples& base);

nlohmann::json to_json(const GpModel& model);
GpModel from_json(const nlohmann::json& doc, Dataset data);

// Expression-graph posterior. Joint points are the fixed `pending` rows first,
// then one candidate per group of dim() inputs in `x`.
struct GraphPosterior {
  std::size_t points = 0;
  std::size_t outputs = 0;
  std::vector<ad::Expr> mean;  // points * outputs
  // Lower-triangular root, per output: root[o][i * (i + 1) / 2 + j] for j <= i.
  std::vector<std::vector<ad::Expr>> root;
};

GraphPosterior graph_posterior(const GpModel& model, ad::GraphBuilder& b,
                               std::span<const ad::Expr> x, const Matrix& pending);

// samples[t][i * outputs + o] for the base samples whose slot count equals
// the number of joint points.
std::vector<std::vector<ad::Expr>> graph_samples(ad::GraphBuilder& b, const GraphPosterior& post,
                                                 const qmc::BaseSamples& base);

}  // namespace mobo::gp

#endif  // MOBO_GP_H_
