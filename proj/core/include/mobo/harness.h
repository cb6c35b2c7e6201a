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

// Benchmark loop: Sobol initial design, then fit / decompose / acquire /
// evaluate until the evaluation budget is spent.

#ifndef MOBO_HARNESS_H_
#define MOBO_HARNESS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mobo/optimize.h"
#include "mobo/pareto.h"
#include "mobo/problems.h"
#include "mobo/types.h"

namespace mobo::harness {

enum class Method { kQehvi, kQparego, kSobol };
enum class Mode { kJoint, kSequentialGreedy };

std::string_view to_string(Method m);
std::string_view to_string(Mode m);
Method parse_method(std::string_view s);
Mode parse_mode(std::string_view s);

struct ExperimentConfig {
  std::string problem = "branin_currin";
  Method method = Method::kQehvi;
  std::size_t q = 1;
  // Total evaluations, initial design included.
  std::size_t budget = 36;
  std::size_t mc_samples = 128;
  std::uint64_t seed = 0;
  double zeta = 0.0;
  Mode mode = Mode::kJoint;
  bool infer_ref = false;
  // Observation noise sd as a fraction of each objective's range.
  double noise = 0.0;
  optim::OptConfig opt;
};

// 2 (d + 1).
std::size_t initial_design_size(std::size_t d);
void validate(const ExperimentConfig& config);

// One batch. Iteration 0 is the initial design.
struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;  // cumulative
  Matrix candidates;            // batch x d, in the problem bounds
  Matrix objectives;            // batch x M as observed
  Matrix constraints;           // batch x V
  Matrix front;                 // feasible Pareto front after this batch (noise-free values)
  double hv = 0.0;
  double log_hv_diff = 0.0;  // NaN without a known true hypervolume
  double acq_seconds = 0.0;  // not part of the serialized trace
  std::vector<std::string> warnings;
};

struct BoTrace {
  ExperimentConfig config;
  std::vector<IterationRecord> records;
};

BoTrace run_bo(const ExperimentConfig& config);

inline constexpr double kLogHvFloor = 1e-10;
// log10(max(true_hv - HV(front), 1e-10)).
double log_hv_difference(double true_hv, const pareto::ParetoFront& front);

struct SweepConfig {
  ExperimentConfig base;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
};

// Trials run in parallel; the result is ordered method-major, then by seed.
std::vector<BoTrace> sweep(const SweepConfig& config);

}  // namespace mobo::harness

#endif  // MOBO_HARNESS_H_
