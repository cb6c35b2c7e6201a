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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mobo/pareto.h"

namespace mobo::pareto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoxDecomposition staircase(const ParetoFront& front) {
  const Vector& r = front.ref();
  const Matrix& P = front.points();
  const Eigen::Index p = P.rows();
  std::vector<Eigen::Index> order(p);
  for (Eigen::Index i = 0; i < p; ++i) order[i] = i;
  // First objective ascending means second objective descending on a front.
  std::sort(order.begin(), order.end(),
            [&P](Eigen::Index a, Eigen::Index b) { return P(a, 0) < P(b, 0); });
  Matrix L(p + 1, 2);
  Matrix U(p + 1, 2);
  double prev_x = r[0];
  for (Eigen::Index i = 0; i < p; ++i) {
    const Eigen::Index j = order[i];
    L.row(i) << prev_x, P(j, 1);
    U.row(i) << P(j, 0), kInf;
    prev_x = P(j, 0);
  }
  L.row(p) << prev_x, r[1];
  U.row(p) << kInf, kInf;
  return BoxDecomposition(std::move(L), std::move(U), front, 0.0);
}

// Cells are index ranges [lo_m, hi_m) into per-dimension coordinate grids.
struct Cell {
  std::vector<std::uint32_t> lo;
  std::vector<std::uint32_t> hi;
};

enum class CellState { kNonDominated, kDominated, kUndecided };

class Partitioner {
 public:
  explicit Partitioner(const ParetoFront& front) : front_(front), dim_(front.dim()) {
    const Matrix& P = front.points();
    grid_.resize(dim_);
    for (std::size_t m = 0; m < dim_; ++m) {
      auto& g = grid_[m];
      g.push_back(front.ref()[m]);
      for (Eigen::Index i = 0; i < P.rows(); ++i) g.push_back(P(i, m));
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      g.push_back(kInf);
      ideal_.push_back(g.size() >= 2 ? g[g.size() - 2] : front.ref()[m]);
    }
  }

  Cell root() const {
    Cell c;
    for (std::size_t m = 0; m < dim_; ++m) {
      c.lo.push_back(0);
      c.hi.push_back(static_cast<std::uint32_t>(grid_[m].size() - 1));
    }
    return c;
  }

  CellState classify(const Cell& c) const {
    const Matrix& P = front_.points();
    bool any_above = false;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      bool above_lower = true;
      bool above_upper = true;
      for (std::size_t m = 0; m < dim_; ++m) {
        const double v = P(i, static_cast<Eigen::Index>(m));
        if (!(v > grid_[m][c.lo[m]])) above_lower = false;
        if (!(v >= grid_[m][c.hi[m]])) above_upper = false;
      }
      if (above_upper) return CellState::kDominated;
      any_above = any_above || above_lower;
    }
    return any_above ? CellState::kUndecided : CellState::kNonDominated;
  }

  std::pair<Cell, Cell> split(const Cell& c) const {
    std::size_t axis = 0;
    std::uint32_t widest = 0;
    for (std::size_t m = 0; m < dim_; ++m) {
      const std::uint32_t span = c.hi[m] - c.lo[m];
      if (span > widest) {
        widest = span;
        axis = m;
      }
    }
    const std::uint32_t mid = c.lo[axis] + widest / 2;
    Cell a = c;
    Cell b = c;
    a.hi[axis] = mid;
    b.lo[axis] = mid;
    return {std::move(a), std::move(b)};
  }

  double clipped_volume(const Cell& c) const {
    double v = 1.0;
    for (std::size_t m = 0; m < dim_; ++m) {
      const double lo = grid_[m][c.lo[m]];
      const double hi = std::min(grid_[m][c.hi[m]], ideal_[m]);
      v *= std::max(hi - lo, 0.0);
    }
    return v;
  }

  void emit(const Cell& c, std::vector<double>& lowers, std::vector<double>& uppers) const {
    for (std::size_t m = 0; m < dim_; ++m) {
      lowers.push_back(grid_[m][c.lo[m]]);
      uppers.push_back(grid_[m][c.hi[m]]);
    }
  }

 private:
  const ParetoFront& front_;
  std::size_t dim_;
  std::vector<std::vector<double>> grid_;
  std::vector<double> ideal_;
};

Matrix to_matrix(const std::vector<double>& flat, std::size_t dim) {
  const auto rows = static_cast<Eigen::Index>(flat.size() / dim);
  Matrix out(rows, static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < rows; ++k) {
    for (std::size_t m = 0; m < dim; ++m) {
      out(k, static_cast<Eigen::Index>(m)) = flat[static_cast<std::size_t>(k) * dim + m];
    }
  }
  return out;
}

BoxDecomposition exact_partition(const ParetoFront& front) {
  const std::size_t dim = front.dim();
  Partitioner part(front);
  std::vector<double> lowers;
  std::vector<double> uppers;
  std::vector<Cell> level{part.root()};
  while (!level.empty()) {
    std::vector<Cell> undecided;
    for (const Cell& c : level) {
      switch (part.classify(c)) {
        case CellState::kNonDominated:
          part.emit(c, lowers, uppers);
          break;
        case CellState::kDominated:
          break;
        case CellState::kUndecided:
          undecided.push_back(c);
          break;
      }
    }
    std::vector<Cell> next;
    next.reserve(undecided.size() * 2);
    for (const Cell& c : undecided) {
      auto [a, b] = part.split(c);
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    level = std::move(next);
  }
  return BoxDecomposition(to_matrix(lowers, dim), to_matrix(uppers, dim), front, 0.0);
}

// Splits the largest undecided cell first and stops once all undecided cells
// together hold less than zeta * HV(front); those cells are emitted as boxes.
BoxDecomposition approximate_partition(const ParetoFront& front, double zeta) {
  struct Pending {
    double volume;
    std::size_t order;
    Cell cell;
  };
  // Max-heap on volume; ties go to the earlier cell.
  auto before = [](const Pending& a, const Pending& b) {
    return a.volume < b.volume || (a.volume == b.volume && a.order > b.order);
  };
  const std::size_t dim = front.dim();
  Partitioner part(front);
  const double budget = zeta * hypervolume(front);
  std::vector<double> lowers;
  std::vector<double> uppers;
  std::vector<Pending> heap;
  std::size_t created = 0;
  double pending = 0.0;
  auto admit = [&](Cell c) {
    switch (part.classify(c)) {
      case CellState::kNonDominated:
        part.emit(c, lowers, uppers);
        break;
      case CellState::kDominated:
        break;
      case CellState::kUndecided: {
        const double v = part.clipped_volume(c);
        pending += v;
        heap.push_back({v, created++, std::move(c)});
        std::push_heap(heap.begin(), heap.end(), before);
        break;
      }
    }
  };
  admit(part.root());
  while (!heap.empty()) {
    if (pending < budget) {
      // Re-sum to shed accumulated rounding before stopping.
      pending = 0.0;
      for (const Pending& p : heap) pending += p.volume;
      if (pending < budget) break;
    }
    std::pop_heap(heap.begin(), heap.end(), before);
    Pending top = std::move(heap.back());
    heap.pop_back();
    pending -= top.volume;
    auto [a, b] = part.split(top.cell);
    admit(std::move(a));
    admit(std::move(b));
  }
  std::sort(heap.begin(), heap.end(),
            [](const Pending& a, const Pending& b) { return a.order < b.order; });
  for (const Pending& p : heap) part.emit(p.cell, lowers, uppers);
  return BoxDecomposition(to_matrix(lowers, dim), to_matrix(uppers, dim), front, zeta);
}

}  // namespace

BoxDecomposition::BoxDecomposition(Matrix lowers, Matrix uppers, ParetoFront front, double zeta)
    : lowers_(std::move(lowers)), uppers_(std::move(uppers)), front_(std::move(front)),
      zeta_(zeta) {
  if (lowers_.rows() != uppers_.rows() || lowers_.cols() != uppers_.cols()) {
    throw ShapeError("box lowers and uppers must have the same shape");
  }
}

double BoxDecomposition::dominated_hypervolume() const {
  if (front_.empty()) return 0.0;
  const Vector& r = front_.ref();
  const Vector ideal = front_.points().colwise().maxCoeff().transpose();
  const auto M = static_cast<Eigen::Index>(front_.dim());
  double box = 1.0;
  for (Eigen::Index m = 0; m < M; ++m) box *= ideal[m] - r[m];
  double uncovered = 0.0;
  for (Eigen::Index k = 0; k < lowers_.rows(); ++k) {
    double v = 1.0;
    for (Eigen::Index m = 0; m < M && v > 0.0; ++m) {
      const double lo = std::max(lowers_(k, m), r[m]);
      const double hi = std::min(uppers_(k, m), ideal[m]);
      v *= std::max(hi - lo, 0.0);
    }
    uncovered += v;
  }
  return box - uncovered;
}

BoxDecomposition BoxDecomposition::with_unit_dimensions(std::size_t count) const {
  const Eigen::Index extra = static_cast<Eigen::Index>(count);
  Matrix L(lowers_.rows(), lowers_.cols() + extra);
  Matrix U(uppers_.rows(), uppers_.cols() + extra);
  L.leftCols(lowers_.cols()) = lowers_;
  U.leftCols(uppers_.cols()) = uppers_;
  L.rightCols(extra).setZero();
  U.rightCols(extra).setOnes();
  Vector ref(front_.dim() + count);
  ref.head(front_.dim()) = front_.ref();
  ref.tail(extra).setZero();
  Matrix pts(front_.size(), front_.dim() + count);
  pts.leftCols(front_.dim()) = front_.points();
  pts.rightCols(extra).setOnes();
  // Front points keep their rows: they are feasible and strictly above 0.
  return BoxDecomposition(std::move(L), std::move(U), ParetoFront(pts, ref), zeta_);
}

BoxDecomposition box_decompose(const ParetoFront& front, double zeta) {
  if (!(zeta >= 0.0)) throw InvalidArgument("zeta must be non-negative");
  const std::size_t dim = front.dim();
  if (dim == 0) throw InvalidArgument("front must have at least one objective");
  if (front.empty()) {
    Matrix L = front.ref().transpose();
    Matrix U = Matrix::Constant(1, static_cast<Eigen::Index>(dim), kInf);
    return BoxDecomposition(std::move(L), std::move(U), front, zeta);
  }
  if (dim == 2) return staircase(front);
  if (dim == 1) {
    Matrix L(1, 1);
    Matrix U(1, 1);
    L(0, 0) = front.points().maxCoeff();
    U(0, 0) = kInf;
    return BoxDecomposition(std::move(L), std::move(U), front, zeta);
  }
  return zeta > 0.0 ? approximate_partition(front, zeta) : exact_partition(front);
}

}  // namespace mobo::pareto
