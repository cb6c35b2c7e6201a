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

// Limited-memory BFGS for box-constrained minimization (L-BFGS-B).
//
// Each iteration computes the generalized Cauchy point of the compact
// limited-memory model along the projected steepest-descent path, minimizes
// the model over the remaining free variables (direct primal method), and
// runs a strong-Wolfe line search along the resulting feasible direction.

#ifndef MOBO_LBFGSB_H_
#define MOBO_LBFGSB_H_

#include <functional>
#include <string_view>

#include "mobo/types.h"

namespace mobo::opt {

struct LbfgsbOptions {
  int memory = 10;
  int max_iterations = 200;
  double pgtol = 1e-8;   // infinity norm of the projected gradient
  double ftol = 2.2e-9;  // relative reduction (f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1)
  int max_line_search = 20;
  double c1 = 1e-3;  // sufficient decrease
  double c2 = 0.9;   // curvature
};

enum class LbfgsbStatus {
  kConverged,          // projected gradient below pgtol
  kFunctionTolerance,  // relative reduction below ftol
  kMaxIterations,
  kLineSearchFailed,
  kEvaluationFailed,  // objective threw at the starting point
};

std::string_view to_string(LbfgsbStatus status);

struct LbfgsbResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsbStatus status = LbfgsbStatus::kMaxIterations;
};

// Returns f(x) and writes the gradient into `grad` (already sized). May throw;
// a throw during the line search is treated as f = +inf at that trial point.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

// Minimizes `f` over lower <= x <= upper starting from the projection of x0.
// Infinite bounds are allowed.
LbfgsbResult lbfgsb_minimize(const Objective& f, const Vector& x0, const Vector& lower,
                             const Vector& upper, const LbfgsbOptions& options = {});

// Infinity norm of P(x - g) - x.
double projected_gradient_norm(const Vector& x, const Vector& g, const Vector& lower,
                               const Vector& upper);

}  // namespace mobo::opt

#endif  // MOBO_LBFGSB_H_
