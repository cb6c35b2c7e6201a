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

// Writes the approximate true-front fixtures in core/data/fronts.
//
//   mobo_make_fronts <output-dir>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "mobo/pareto.h"
#include "mobo/problems.h"
#include "mobo/sampling.h"

namespace {

using mobo::Matrix;
using mobo::Vector;
namespace problems = mobo::problems;

constexpr std::size_t kSobolPoints = 1u << 20;
constexpr std::size_t kChunk = 1u << 14;
constexpr std::size_t kMaxRows = 4000;

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

// Pareto filter in chunks, then over the union of the chunk fronts.
Matrix front_of(const Matrix& points) {
  std::vector<Matrix> parts;
  Eigen::Index rows = 0;
  for (Eigen::Index s = 0; s < points.rows(); s += kChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kChunk, points.rows() - s);
    const Matrix chunk = points.middleRows(s, n);
    parts.push_back(select_rows(chunk, mobo::pareto::pareto_filter(chunk)));
    rows += parts.back().rows();
  }
  Matrix all(rows, points.cols());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    all.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return select_rows(all, mobo::pareto::pareto_filter(all));
}

void write(const std::filesystem::path& path, const std::string& name, const Vector& ref,
           double hv, const Matrix& front, const std::vector<std::string>& notes) {
  std::ofstream out(path);
  out << "# problem: " << name << "\n";
  out << "# convention: maximization (negated objectives)\n";
  out << "# reference:";
  for (Eigen::Index m = 0; m < ref.size(); ++m) out << ' ' << ref[m];
  out << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", hv);
  out << "# hypervolume: " << buf << "\n";
  for (const auto& n : notes) out << "# " << n << "\n";
  const Eigen::Index stride = std::max<Eigen::Index>(1, (front.rows() + kMaxRows - 1) / kMaxRows);
  out << "# rows: " << front.rows() << " front points, every " << stride << " written\n";
  for (Eigen::Index m = 0; m < front.cols(); ++m) out << (m ? ",f" : "f") << m + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < front.rows(); i += stride) {
    for (Eigen::Index m = 0; m < front.cols(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g", front(i, m));
      out << (m ? "," : "") << buf;
    }
    out << "\n";
  }
}

void sobol_fixture(const std::filesystem::path& dir, const std::string& name) {
  const problems::ProblemSpec p = problems::make_problem(name);
  const Matrix u = mobo::qmc::sobol(kSobolPoints, p.d, 0);
  Matrix Y(u.rows(), static_cast<Eigen::Index>(p.M));
  Eigen::Index feasible = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const problems::Evaluation e = p.evaluate(p.from_unit(u.row(i).transpose()));
    if ((e.constraints.array() >= 0.0).all()) Y.row(feasible++) = e.objectives.transpose();
  }
  const Matrix front = front_of(Y.topRows(feasible));
  const double hv = mobo::pareto::hypervolume(front, p.ref_point);
  write(dir / (name + ".csv"), name, p.ref_point, hv, front,
        {"construction: mobo_make_fronts; 2^20 scrambled Sobol points (seed 0) scaled to the "
         "bounds, feasible rows only, Pareto-filtered"});
  std::cout << name << ": " << front.rows() << " front points, hv " << hv << "\n";
}

void c2_fixture(const std::filesystem::path& dir) {
  const problems::ProblemSpec p = problems::make_problem("c2_dtlz2");
  const double hv = problems::c2_dtlz2_true_hv();
  // Feasible points of the unit arc, for plotting.
  std::vector<Vector> rows;
  for (int i = 0; i <= 20000; ++i) {
    const double t = 0.5 * std::numbers::pi * i / 20000.0;
    Vector f(2);
    f << std::cos(t), std::sin(t);
    if (problems::c2_constraint(f, problems::kC2Radius) >= 0.0) rows.push_back(-f);
  }
  Matrix front(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) front.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  write(dir / "c2_dtlz2.csv", "c2_dtlz2", p.ref_point, hv, front,
        {"constraint radius: 0.2 (assumed; the standard C2-DTLZ2 value)",
         "construction: mobo_make_fronts; exact 2-d hypervolume of 2^22 points on the unit arc "
         "and the constraint circles, feasible and outside the unit ball",
         "rows below are the feasible unit-arc points only"});
  std::cout << "c2_dtlz2: hv " << hv << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mobo_make_fronts <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (const char* name : {"branin_currin", "constrained_branin_currin", "vehicle_safety"}) {
    sobol_fixture(dir, name);
  }
  c2_fixture(dir);
  return 0;
}
