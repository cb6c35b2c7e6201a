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

// Reverse-mode differentiation over immutable scalar expression graphs.
//
// A GraphBuilder records nodes in topological order (operands always refer to
// earlier nodes) and is consumed by build(), which yields an immutable Graph.
// The Graph can then be evaluated or differentiated any number of times with
// different input values; each call owns its workspace, so a Graph may be
// shared between threads.
//
// Non-smooth operations use fixed subgradients:
//   * minimum / maximum send the adjoint to the first operand (in operand
//     order) attaining the extremum;
//   * clamp-below-at-zero has gradient 0 at exactly 0.

#ifndef MOBO_AUTODIFF_H_
#define MOBO_AUTODIFF_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mobo/error.h"
#include "mobo/types.h"

namespace mobo::ad {

enum class OpKind : std::uint8_t {
  kInput,
  kConstant,
  kAdd,
  kSubtract,
  kMultiply,
  kDivide,
  kNegate,
  kExp,
  kLog,
  kSqrt,
  kPower,      // operand ^ constant exponent
  kMinimum,    // n-ary
  kMaximum,    // n-ary
  kClampZero,  // max(x, 0)
  kSigmoid,
  kMatVec,  // one row of a constant matrix times the operand vector
  kDot,     // sum_i a_i * b_i over two operand halves
  kSum,     // n-ary sum
};

std::string_view to_string(OpKind kind);

// Raised when a forward pass produces a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(std::uint32_t node, OpKind kind, double value);
  std::uint32_t node() const { return node_; }
  OpKind kind() const { return kind_; }

 private:
  std::uint32_t node_;
  OpKind kind_;
};

struct GradResult {
  double value = 0.0;
  std::vector<double> gradient;  // aligned with input slots
};

// Scratch buffers for one evaluation. Reusing a Workspace across calls avoids
// reallocation; a Workspace must not be shared between concurrent calls.
struct Workspace {
  std::vector<double> values;
  std::vector<double> adjoints;
};

class Graph {
 public:
  Graph() = default;

  std::size_t input_count() const { return input_nodes_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  double evaluate(std::span<const double> inputs) const;
  double evaluate(std::span<const double> inputs, Workspace& ws) const;

  GradResult gradient(std::span<const double> inputs) const;
  // Writes the gradient into `grad` (length input_count()) and returns the value.
  double value_and_gradient(std::span<const double> inputs, std::span<double> grad,
                            Workspace& ws) const;

  // Hash of the active branch of every min / max / clamp node at `inputs`.
  // Two points with equal signatures lie on the same smooth piece.
  std::uint64_t branch_signature(std::span<const double> inputs) const;

 private:
  friend class GraphBuilder;

  struct Node {
    OpKind kind;
    std::uint32_t first;  // offset into operands_ (or weights_ for kConstant)
    std::uint32_t count;  // number of operands
    std::uint32_t weights;  // offset into weights_ for kMatVec
    double payload;  // constant value or exponent
  };

  void forward(std::span<const double> inputs, std::vector<double>& values) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> operands_;
  std::vector<double> weights_;
  std::vector<std::uint32_t> input_nodes_;
  std::uint32_t output_ = 0;
};

class GraphBuilder;

// Handle to a node under construction. Arithmetic operators append nodes to
// the owning builder.
class Expr {
 public:
  Expr() = default;
  std::uint32_t id() const { return id_; }
  GraphBuilder* builder() const { return builder_; }
  bool valid() const { return builder_ != nullptr; }

 private:
  friend class GraphBuilder;
  Expr(GraphBuilder* b, std::uint32_t id) : builder_(b), id_(id) {}
  GraphBuilder* builder_ = nullptr;
  std::uint32_t id_ = 0;
};

class GraphBuilder {
 public:
  GraphBuilder() = default;
  GraphBuilder(const GraphBuilder&) = delete;
  GraphBuilder& operator=(const GraphBuilder&) = delete;

  Expr input();
  std::vector<Expr> inputs(std::size_t n);
  // Constants are interned; non-finite constants are rejected.
  Expr constant(double value);

  Expr add(Expr a, Expr b);
  Expr subtract(Expr a, Expr b);
  Expr multiply(Expr a, Expr b);
  Expr divide(Expr a, Expr b);
  Expr negate(Expr a);
  Expr exp(Expr a);
  Expr log(Expr a);
  Expr sqrt(Expr a);
  Expr power(Expr a, double exponent);
  Expr minimum(std::span<const Expr> args);
  Expr maximum(std::span<const Expr> args);
  Expr clamp_zero(Expr a);
  Expr sigmoid(Expr a);
  Expr matvec_row(std::span<const double> weights, std::span<const Expr> args);
  std::vector<Expr> matvec(const Matrix& weights, std::span<const Expr> args);
  Expr dot(std::span<const Expr> a, std::span<const Expr> b);
  Expr sum(std::span<const Expr> args);

  std::size_t node_count() const { return graph_.nodes_.size(); }

  // Finalizes the graph with `output` as the result node. The builder is left
  // empty afterwards.
  Graph build(Expr output);

 private:
  Expr push(OpKind kind, std::span<const Expr> args, double payload = 0.0);
  void check(Expr e) const;

  Graph graph_;
  std::unordered_map<std::uint64_t, std::uint32_t> constants_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator+(Expr a, double b);
Expr operator-(Expr a, double b);
Expr operator*(Expr a, double b);
Expr operator*(double a, Expr b);
Expr exp(Expr a);
Expr log(Expr a);
Expr sqrt(Expr a);
Expr pow(Expr a, double exponent);
Expr min(Expr a, Expr b);
Expr max(Expr a, Expr b);
Expr clamp_zero(Expr a);
Expr sigmoid(Expr a);

// Maximum over inputs of |reverse - central difference| / max(|reverse|,
// |central|, 1e-6 * max(1, |f(x)|)). The floor keeps components whose true
// derivative vanishes from reporting pure round-off as relative error.
double check_gradient(const Graph& graph, std::span<const double> inputs, double step);

// Per-component relative errors (same definition as check_gradient). When
// `skip_kinks` is set, components whose +/- step stencil crosses a branch
// change of a min / max / clamp node are reported as NaN.
std::vector<double> gradient_errors(const Graph& graph, std::span<const double> inputs,
                                    double step, bool skip_kinks);

}  // namespace mobo::ad

#endif  // MOBO_AUTODIFF_H_
