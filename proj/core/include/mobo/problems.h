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

// Benchmark problems. The raw functions return minimization values as usually
// published; ProblemSpec::evaluate negates them so the engine maximizes, and
// reference points are negated to match. Constraint slacks are feasible when
// >= 0.

#ifndef MOBO_PROBLEMS_H_
#define MOBO_PROBLEMS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mobo/error.h"
#include "mobo/types.h"

namespace mobo::problems {

struct Evaluation {
  Vector objectives;   // M, maximized
  Vector constraints;  // V slacks
};

struct ProblemSpec {
  std::string name;
  std::size_t d = 0;
  std::size_t M = 0;
  std::size_t V = 0;
  Matrix bounds;     // d x 2
  Vector ref_point;  // maximization convention
  std::function<Evaluation(const Vector& x)> evaluate;
  std::optional<double> true_front_hv;

  // Maps a point of the unit cube onto `bounds`.
  Vector from_unit(const Vector& u) const;
  Vector to_unit(const Vector& x) const;
};

class UnknownProblem : public Error {
 public:
  using Error::Error;
};

double branin(double x1, double x2);
// Currin's exponential function; the x2 -> 0 limit of the leading factor is 1.
double currin(double x1, double x2);
// (f1, f2) at a point of the unit square.
Vector branin_currin(const Vector& x);
double branin_currin_disk(const Vector& x);

Vector dtlz2(const Vector& x, std::size_t M);
double c2_constraint(const Vector& f, double r);
inline constexpr double kC2Radius = 0.2;

Vector vehicle_safety(const Vector& x);

// 1.1^M minus the volume of the unit ball in the positive orthant.
double dtlz2_true_hv(std::size_t M, double ref = 1.1);
// Feasible-front hypervolume of C2-DTLZ2 with reference (ref, ..., ref), for
// M = 2, from a dense sweep of the feasible boundary.
double c2_dtlz2_true_hv(double r = kC2Radius, double ref = 1.1);

ProblemSpec branin_currin_problem();
ProblemSpec constrained_branin_currin_problem();
ProblemSpec dtlz2_problem(std::size_t d, std::size_t M);
ProblemSpec c2_dtlz2_problem(std::size_t d, std::size_t M, double r = kC2Radius);
ProblemSpec vehicle_safety_problem();

// Registered names: branin_currin, constrained_branin_currin, dtlz2 (d=6,
// M=2), dtlz2_m3 and dtlz2_m4 (d=6), c2_dtlz2 (d=12, M=2), vehicle_safety.
ProblemSpec make_problem(std::string_view name);
std::vector<std::string> problem_names();

// Per-objective max - min over `count` Sobol points scaled to the bounds.
Vector objective_range(const ProblemSpec& problem, std::size_t count = 1u << 14);

// Adds iid N(0, (relative_sd * range_m)^2) noise to objective m. Each copy of
// the returned spec shares one generator.
ProblemSpec with_noise(const ProblemSpec& problem, double relative_sd, std::uint64_t seed);

// Hypervolumes of the stored approximate true fronts, keyed by problem name.
std::optional<double> fixture_hypervolume(std::string_view name);

}  // namespace mobo::problems

#endif  // MOBO_PROBLEMS_H_
