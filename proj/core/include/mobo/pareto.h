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

// Pareto dominance, exact hypervolume, decomposition of the non-dominated
// region into disjoint boxes, and the deterministic inclusion-exclusion
// hypervolume-improvement kernel. All objectives are maximized.

#ifndef MOBO_PARETO_H_
#define MOBO_PARETO_H_

#include <cstddef>
#include <span>
#include <vector>

#include "mobo/error.h"
#include "mobo/types.h"

namespace mobo::pareto {

// a dominates b: a >= b in every coordinate and a > b in at least one.
bool dominates(std::span<const double> a, std::span<const double> b);

// Indices (ascending) of rows not dominated by any other row. Exact duplicates
// do not dominate each other, so all copies are kept.
std::vector<std::size_t> pareto_filter(const Matrix& points);

class ParetoFront {
 public:
  // Keeps the rows that strictly dominate `ref` in every coordinate, drops
  // dominated rows and collapses duplicates.
  ParetoFront(const Matrix& points, Vector ref);
  explicit ParetoFront(Vector ref);

  const Matrix& points() const { return points_; }
  const Vector& ref() const { return ref_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(ref_.size()); }
  bool empty() const { return points_.rows() == 0; }

 private:
  Matrix points_;
  Vector ref_;
};

// Hypervolume dominated by the front and bounded below by its reference point
// (dimension-sweep recursion with an O(p log p) two-dimensional base case).
double hypervolume(const ParetoFront& front);
// Convenience overload: builds the front from arbitrary rows first.
double hypervolume(const Matrix& points, const Vector& ref);

// Disjoint axis-parallel boxes [lower_k, upper_k] whose union is the region
// above the reference point that the front does not dominate. Upper bounds may
// be +inf.
class BoxDecomposition {
 public:
  BoxDecomposition(Matrix lowers, Matrix uppers, ParetoFront front, double zeta);

  const Matrix& lowers() const { return lowers_; }
  const Matrix& uppers() const { return uppers_; }
  const ParetoFront& front() const { return front_; }
  std::size_t size() const { return static_cast<std::size_t>(lowers_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(lowers_.cols()); }
  double zeta() const { return zeta_; }

  // vol([ref, ideal]) - vol(boxes within [ref, ideal]). Equals the front's
  // hypervolume for an exact decomposition and lies in
  // [(1 - zeta) * HV, HV] for an approximate one.
  double dominated_hypervolume() const;

  // Appends `count` unit dimensions with lower 0 and upper 1 to every box.
  // Used to express feasibility indicators as extra objectives.
  BoxDecomposition with_unit_dimensions(std::size_t count) const;

 private:
  Matrix lowers_;
  Matrix uppers_;
  ParetoFront front_;
  double zeta_;
};

// zeta = 0 gives an exact decomposition: the staircase for two objectives and
// binary partitioning of the coordinate grid otherwise. With zeta > 0 the
// largest undecided cell is split first and partitioning stops once the
// still-undecided cells hold less than zeta * HV(front) of volume below the
// ideal point; those cells are emitted as boxes, so the decomposition
// over-covers by at most that amount.
BoxDecomposition box_decompose(const ParetoFront& front, double zeta = 0.0);

class BatchTooLarge : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultMaxBatch = 16;

// Joint hypervolume improvement of the rows of `Y` over the decomposed front,
// by inclusion-exclusion over the 2^q - 1 non-empty subsets of rows.
double hvi_inclusion_exclusion(const Matrix& Y, const BoxDecomposition& decomp,
                               std::size_t max_batch = kDefaultMaxBatch);

// Same, with each subset term multiplied by the product over its members of
// the indicator that every constraint slack (row of `slacks`) is >= 0.
double hvi_constrained_inclusion_exclusion(const Matrix& Y, const Matrix& slacks,
                                           const BoxDecomposition& decomp,
                                           std::size_t max_batch = kDefaultMaxBatch);

// Componentwise minimum of the observed Pareto front (the nadir) moved outward
// by 10% of its magnitude.
Vector infer_reference_point(const Matrix& observed);

}  // namespace mobo::pareto

#endif  // MOBO_PARETO_H_
