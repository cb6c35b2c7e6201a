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

#include "mobo/pareto.h"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

namespace mobo::pareto {

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] < b[m]) return false;
    if (a[m] > b[m]) strictly = true;
  }
  return strictly;
}

namespace {

std::span<const double> row_span(const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                     Eigen::RowMajor>& m,
                                 Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::vector<std::size_t> pareto_filter(const Matrix& points) {
  const Eigen::Index n = points.rows();
  const RowMatrix rows = points;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Lexicographically descending: only earlier rows can dominate later ones.
  std::stable_sort(order.begin(), order.end(), [&rows](std::size_t a, std::size_t b) {
    for (Eigen::Index m = 0; m < rows.cols(); ++m) {
      if (rows(a, m) != rows(b, m)) return rows(a, m) > rows(b, m);
    }
    return false;
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const auto candidate = row_span(rows, static_cast<Eigen::Index>(idx));
    bool dominated = false;
    for (std::size_t k : kept) {
      if (dominates(row_span(rows, static_cast<Eigen::Index>(k)), candidate)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// ---------------------------------------------------------------------------

ParetoFront::ParetoFront(Vector ref) : points_(0, ref.size()), ref_(std::move(ref)) {}

ParetoFront::ParetoFront(const Matrix& points, Vector ref) : ref_(std::move(ref)) {
  const Eigen::Index dim = ref_.size();
  if (points.rows() > 0 && points.cols() != dim) {
    throw ShapeError("front points have " + std::to_string(points.cols()) +
                     " columns, reference point has " + std::to_string(dim));
  }
  if (!ref_.allFinite()) throw InvalidArgument("reference point must be finite");
  if (!points.allFinite()) throw InvalidArgument("front points must be finite");
  std::vector<Eigen::Index> above;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if ((points.row(r).transpose().array() > ref_.array()).all()) above.push_back(r);
  }
  Matrix candidates(static_cast<Eigen::Index>(above.size()), dim);
  for (std::size_t i = 0; i < above.size(); ++i) candidates.row(i) = points.row(above[i]);
  std::vector<std::size_t> keep = pareto_filter(candidates);
  // Collapse exact duplicates.
  std::vector<std::size_t> unique;
  for (std::size_t k : keep) {
    bool dup = false;
    for (std::size_t u : unique) {
      if (candidates.row(k) == candidates.row(u)) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(k);
  }
  points_.resize(static_cast<Eigen::Index>(unique.size()), dim);
  for (std::size_t i = 0; i < unique.size(); ++i) points_.row(i) = candidates.row(unique[i]);
}

// ---------------------------------------------------------------------------

namespace {

// Hypervolume of `pts` (each row strictly above ref in the first `dim`
// coordinates) using the first `dim` columns.
double hv_recursive(std::vector<const double*>& pts, const double* ref, std::size_t dim) {
  if (pts.empty()) return 0.0;
  if (dim == 1) {
    double best = ref[0];
    for (const double* p : pts) best = std::max(best, p[0]);
    return best - ref[0];
  }
  if (dim == 2) {
    std::sort(pts.begin(), pts.end(), [](const double* a, const double* b) {
      return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
    });
    double area = 0.0;
    double best_y = ref[1];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      best_y = std::max(best_y, pts[i][1]);
      const double next_x = i + 1 < pts.size() ? pts[i + 1][0] : ref[0];
      area += (pts[i][0] - next_x) * (best_y - ref[1]);
    }
    return area;
  }
  const std::size_t last = dim - 1;
  std::sort(pts.begin(), pts.end(),
            [last](const double* a, const double* b) { return a[last] > b[last]; });
  double volume = 0.0;
  std::vector<const double*> active;
  active.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    active.push_back(pts[i]);
    const double next = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
    const double height = pts[i][last] - next;
    if (height <= 0.0) continue;
    std::vector<const double*> slice = active;
    volume += height * hv_recursive(slice, ref, dim - 1);
  }
  return volume;
}

}  // namespace

double hypervolume(const ParetoFront& front) {
  if (front.empty()) return 0.0;
  const RowMatrix rows = front.points();
  std::vector<const double*> pts;
  pts.reserve(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) pts.push_back(rows.data() + r * rows.cols());
  return hv_recursive(pts, front.ref().data(), front.dim());
}

double hypervolume(const Matrix& points, const Vector& ref) {
  return hypervolume(ParetoFront(points, ref));
}

// ---------------------------------------------------------------------------

namespace {

void check_batch(const Matrix& Y, const BoxDecomposition& decomp, std::size_t max_batch) {
  if (Y.rows() < 1) throw InvalidArgument("HVI needs at least one point");
  if (static_cast<std::size_t>(Y.rows()) > max_batch) {
    throw BatchTooLarge("batch of " + std::to_string(Y.rows()) + " points exceeds maximum " +
                        std::to_string(max_batch) + " (2^q - 1 inclusion-exclusion terms)");
  }
  if (static_cast<std::size_t>(Y.cols()) != decomp.dim()) {
    throw ShapeError("points and decomposition have different dimensions");
  }
  if (!Y.allFinite()) throw InvalidArgument("HVI points must be finite");
}

double hvi_weighted(const Matrix& Y, const std::vector<double>& point_weight,
                    const BoxDecomposition& decomp) {
  const auto q = static_cast<std::size_t>(Y.rows());
  const auto M = static_cast<Eigen::Index>(Y.cols());
  const Matrix& L = decomp.lowers();
  const Matrix& U = decomp.uppers();
  const std::size_t subsets = (std::size_t{1} << q) - 1;
  Vector z(M);
  double total = 0.0;
  for (std::size_t mask = 1; mask <= subsets; ++mask) {
    double weight = 1.0;
    z.setConstant(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < q; ++i) {
      if (mask & (std::size_t{1} << i)) {
        z = z.cwiseMin(Y.row(static_cast<Eigen::Index>(i)).transpose());
        weight *= point_weight[i];
      }
    }
    if (weight == 0.0) continue;
    const double sign = (std::popcount(mask) % 2 == 1) ? 1.0 : -1.0;
    double subset_sum = 0.0;
    for (Eigen::Index k = 0; k < L.rows(); ++k) {
      double vol = 1.0;
      for (Eigen::Index m = 0; m < M && vol > 0.0; ++m) {
        vol *= std::max(std::min(U(k, m), z[m]) - L(k, m), 0.0);
      }
      subset_sum += vol;
    }
    total += sign * weight * subset_sum;
  }
  return total;
}

}  // namespace

double hvi_inclusion_exclusion(const Matrix& Y, const BoxDecomposition& decomp,
                               std::size_t max_batch) {
  check_batch(Y, decomp, max_batch);
  return hvi_weighted(Y, std::vector<double>(Y.rows(), 1.0), decomp);
}

double hvi_constrained_inclusion_exclusion(const Matrix& Y, const Matrix& slacks,
                                           const BoxDecomposition& decomp,
                                           std::size_t max_batch) {
  check_batch(Y, decomp, max_batch);
  if (slacks.rows() != Y.rows()) throw ShapeError("one row of constraint slacks per point");
  std::vector<double> weight(Y.rows(), 1.0);
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index v = 0; v < slacks.cols(); ++v) {
      if (!(slacks(i, v) >= 0.0)) weight[i] = 0.0;
    }
  }
  return hvi_weighted(Y, weight, decomp);
}

Vector infer_reference_point(const Matrix& observed) {
  if (observed.rows() < 1) throw InvalidArgument("reference point inference needs observations");
  const std::vector<std::size_t> front = pareto_filter(observed);
  Vector nadir = observed.row(front.front()).transpose();
  for (std::size_t idx : front) {
    nadir = nadir.cwiseMin(observed.row(static_cast<Eigen::Index>(idx)).transpose());
  }
  return nadir - 0.1 * nadir.cwiseAbs();
}

}  // namespace mobo::pareto
