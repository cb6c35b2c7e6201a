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

// JSON and CSV encodings for fronts, decompositions, experiment configs and
// traces. Infinite entries are written as the strings "inf" / "-inf" and
// missing values as null.

#ifndef MOBO_SERIALIZATION_H_
#define MOBO_SERIALIZATION_H_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mobo/harness.h"
#include "mobo/pareto.h"
#include "mobo/types.h"

namespace mobo::io {

inline constexpr int kSchemaVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index cols);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const pareto::ParetoFront& front);
pareto::ParetoFront front_from_json(const nlohmann::json& j);
nlohmann::json to_json(const pareto::BoxDecomposition& decomp);
pareto::BoxDecomposition decomposition_from_json(const nlohmann::json& j);

nlohmann::json to_json(const harness::ExperimentConfig& config);
harness::ExperimentConfig config_from_json(const nlohmann::json& j);

// Wall-clock timings are left out so that equal configs give equal documents.
nlohmann::json to_json(const harness::BoTrace& trace);
harness::BoTrace trace_from_json(const nlohmann::json& j);

// One row per (trial, iteration): schema_version, problem, method, q, seed,
// iteration, evaluations, hv, log_hv_diff, acq_seconds.
std::string results_csv(const std::vector<harness::BoTrace>& traces);

struct ResultRow {
  std::string problem;
  std::string method;
  std::size_t q = 0;
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  double hv = 0.0;
  double log_hv_diff = 0.0;
  double acq_seconds = 0.0;
};
std::vector<ResultRow> parse_results_csv(const std::string& text);

// Numeric CSV: lines starting with '#' and a non-numeric first row are
// skipped.
Matrix parse_points_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mobo::io

#endif  // MOBO_SERIALIZATION_H_
