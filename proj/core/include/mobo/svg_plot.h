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

// Convergence plots: per-method median across seeds with a band of two
// standard errors, rendered as a standalone SVG document.

#ifndef MOBO_SVG_PLOT_H_
#define MOBO_SVG_PLOT_H_

#include <string>
#include <vector>

#include "mobo/serialization.h"

namespace mobo::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> center;  // median across seeds
  std::vector<double> lower;   // center - 2 SE
  std::vector<double> upper;   // center + 2 SE
  std::vector<std::size_t> count;
};

enum class XAxis { kIteration, kEvaluations };
enum class Metric { kLogHvDiff, kHv };

// One series per (problem, method, q), ordered by first appearance. The
// standard error is the sample sd over seeds divided by sqrt(seeds).
std::vector<Series> summarize(const std::vector<io::ResultRow>& rows, XAxis axis, Metric metric);

struct PlotOptions {
  std::string title;
  std::string x_label = "function evaluations";
  std::string y_label = "log10 HV difference";
  int width = 720;
  int height = 440;
};

std::string render_svg(const std::vector<Series>& series, const PlotOptions& options);

}  // namespace mobo::plot

#endif  // MOBO_SVG_PLOT_H_
