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

// Multi-start bounded quasi-Newton maximization of acquisition functions:
// raw-sample initialization, joint q-batch optimization and sequential greedy
// batch construction.

#ifndef MOBO_OPTIMIZE_H_
#define MOBO_OPTIMIZE_H_

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mobo/acquisition.h"
#include "mobo/types.h"

namespace mobo::optim {

enum class GradientMode {
  kExact,
  kCentralDifference,  // 2 * q * d extra value evaluations per gradient
};

struct OptConfig {
  std::size_t restarts = 20;
  std::size_t raw_samples = 1024;
  int max_iterations = 200;
  Matrix bounds;  // d x 2 (lower, upper); empty means the unit cube
  std::uint64_t seed = 0;
  GradientMode gradient = GradientMode::kExact;
  double fd_step = 1e-6;
};

struct RestartResult {
  Matrix X;
  double initial_value = 0.0;
  double value = 0.0;
  int iterations = 0;
  std::size_t evaluations = 0;
  bool failed = false;  // line search or evaluation failure
  // (evaluations so far, value) after each acquisition call, in call order.
  std::vector<std::pair<std::size_t, double>> progress;
};

struct OptResult {
  Matrix X;  // q x d
  double value = 0.0;
  bool degraded = false;  // every restart failed to converge cleanly
  std::size_t evaluations = 0;  // acquisition evaluations including initialization
  std::vector<RestartResult> restarts;
  std::vector<double> marginal_values;  // sequential greedy only
};

// Top `restarts` of `raw_samples` scrambled-Sobol q-batches, ties broken by
// generation order.
std::vector<Matrix> generate_initial_conditions(const acq::Acquisition& acqf,
                                                const OptConfig& config);

OptResult optimize_from(const acq::Acquisition& acqf, const std::vector<Matrix>& starts,
                        const OptConfig& config);

OptResult optimize_joint(const acq::Acquisition& acqf, const OptConfig& config);

// Builds the one-candidate acquisition for greedy step `step` given the
// candidates chosen so far.
using AcquisitionFamily = std::function<acq::Acquisition(const Matrix& pending, std::size_t step)>;

// value is the sum of the per-step marginal values, which equals the joint
// value when the family shares base samples across steps.
OptResult optimize_sequential_greedy(const AcquisitionFamily& family, const OptConfig& config,
                                     std::size_t q);

}  // namespace mobo::optim

#endif  // MOBO_OPTIMIZE_H_
