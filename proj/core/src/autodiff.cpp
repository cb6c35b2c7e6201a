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

#include "mobo/autodiff.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace mobo::ad {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kInput: return "input";
    case OpKind::kConstant: return "constant";
    case OpKind::kAdd: return "add";
    case OpKind::kSubtract: return "subtract";
    case OpKind::kMultiply: return "multiply";
    case OpKind::kDivide: return "divide";
    case OpKind::kNegate: return "negate";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kPower: return "power";
    case OpKind::kMinimum: return "minimum";
    case OpKind::kMaximum: return "maximum";
    case OpKind::kClampZero: return "clamp-below-at-zero";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kMatVec: return "matrix-vector product";
    case OpKind::kDot: return "dot product";
    case OpKind::kSum: return "sum-reduce";
  }
  return "unknown";
}

namespace {

std::string describe(std::uint32_t node, OpKind kind, double value) {
  std::ostringstream os;
  os << "non-finite value " << value << " at node " << node << " (" << to_string(kind) << ")";
  return os.str();
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

EvaluationError::EvaluationError(std::uint32_t node, OpKind kind, double value)
    : Error(describe(node, kind, value)), node_(node), kind_(kind) {}

void Graph::forward(std::span<const double> inputs, std::vector<double>& values) const {
  if (inputs.size() != input_nodes_.size()) {
    throw ShapeError("graph expects " + std::to_string(input_nodes_.size()) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  values.resize(nodes_.size());
  double* v = values.data();
  const std::uint32_t* ops = operands_.data();
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::uint32_t* a = ops + n.first;
    double r = 0.0;
    switch (n.kind) {
      case OpKind::kInput: r = inputs[n.first]; break;
      case OpKind::kConstant: r = n.payload; break;
      case OpKind::kAdd: r = v[a[0]] + v[a[1]]; break;
      case OpKind::kSubtract: r = v[a[0]] - v[a[1]]; break;
      case OpKind::kMultiply: r = v[a[0]] * v[a[1]]; break;
      case OpKind::kDivide: r = v[a[0]] / v[a[1]]; break;
      case OpKind::kNegate: r = -v[a[0]]; break;
      case OpKind::kExp: r = std::exp(v[a[0]]); break;
      case OpKind::kLog: r = v[a[0]] > 0.0 ? std::log(v[a[0]]) : std::nan(""); break;
      case OpKind::kSqrt: r = v[a[0]] >= 0.0 ? std::sqrt(v[a[0]]) : std::nan(""); break;
      case OpKind::kPower: r = std::pow(v[a[0]], n.payload); break;
      case OpKind::kMinimum: {
        r = v[a[0]];
        for (std::uint32_t k = 1; k < n.count; ++k) r = std::min(r, v[a[k]]);
        break;
      }
      case OpKind::kMaximum: {
        r = v[a[0]];
        for (std::uint32_t k = 1; k < n.count; ++k) r = std::max(r, v[a[k]]);
        break;
      }
      case OpKind::kClampZero: r = v[a[0]] > 0.0 ? v[a[0]] : 0.0; break;
      case OpKind::kSigmoid: r = stable_sigmoid(v[a[0]]); break;
      case OpKind::kMatVec: {
        const double* w = weights_.data() + n.weights;
        for (std::uint32_t k = 0; k < n.count; ++k) r += w[k] * v[a[k]];
        break;
      }
      case OpKind::kDot: {
        const std::uint32_t half = n.count / 2;
        for (std::uint32_t k = 0; k < half; ++k) r += v[a[k]] * v[a[half + k]];
        break;
      }
      case OpKind::kSum: {
        for (std::uint32_t k = 0; k < n.count; ++k) r += v[a[k]];
        break;
      }
    }
    if (!std::isfinite(r)) throw EvaluationError(i, n.kind, r);
    v[i] = r;
  }
}

double Graph::evaluate(std::span<const double> inputs) const {
  Workspace ws;
  return evaluate(inputs, ws);
}

double Graph::evaluate(std::span<const double> inputs, Workspace& ws) const {
  forward(inputs, ws.values);
  return ws.values[output_];
}

GradResult Graph::gradient(std::span<const double> inputs) const {
  Workspace ws;
  GradResult result;
  result.gradient.assign(input_nodes_.size(), 0.0);
  result.value = value_and_gradient(inputs, result.gradient, ws);
  return result;
}

double Graph::value_and_gradient(std::span<const double> inputs, std::span<double> grad,
                                 Workspace& ws) const {
  if (grad.size() != input_nodes_.size()) {
    throw ShapeError("gradient buffer length does not match input count");
  }
  forward(inputs, ws.values);
  const double* v = ws.values.data();
  ws.adjoints.assign(nodes_.size(), 0.0);
  double* adj = ws.adjoints.data();
  adj[output_] = 1.0;
  const std::uint32_t* ops = operands_.data();

  for (std::uint32_t i = output_ + 1; i-- > 0;) {
    const double g = adj[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    const std::uint32_t* a = ops + n.first;
    switch (n.kind) {
      case OpKind::kInput:
      case OpKind::kConstant: break;
      case OpKind::kAdd:
        adj[a[0]] += g;
        adj[a[1]] += g;
        break;
      case OpKind::kSubtract:
        adj[a[0]] += g;
        adj[a[1]] -= g;
        break;
      case OpKind::kMultiply:
        adj[a[0]] += g * v[a[1]];
        adj[a[1]] += g * v[a[0]];
        break;
      case OpKind::kDivide:
        adj[a[0]] += g / v[a[1]];
        adj[a[1]] -= g * v[i] / v[a[1]];
        break;
      case OpKind::kNegate: adj[a[0]] -= g; break;
      case OpKind::kExp: adj[a[0]] += g * v[i]; break;
      case OpKind::kLog: adj[a[0]] += g / v[a[0]]; break;
      case OpKind::kSqrt: adj[a[0]] += g * 0.5 / v[i]; break;
      case OpKind::kPower:
        adj[a[0]] += g * n.payload * std::pow(v[a[0]], n.payload - 1.0);
        break;
      case OpKind::kMinimum:
      case OpKind::kMaximum: {
        for (std::uint32_t k = 0; k < n.count; ++k) {
          if (v[a[k]] == v[i]) {
            adj[a[k]] += g;
            break;
          }
        }
        break;
      }
      case OpKind::kClampZero:
        if (v[a[0]] > 0.0) adj[a[0]] += g;
        break;
      case OpKind::kSigmoid: adj[a[0]] += g * v[i] * (1.0 - v[i]); break;
      case OpKind::kMatVec: {
        const double* w = weights_.data() + n.weights;
        for (std::uint32_t k = 0; k < n.count; ++k) adj[a[k]] += g * w[k];
        break;
      }
      case OpKind::kDot: {
        const std::uint32_t half = n.count / 2;
        for (std::uint32_t k = 0; k < half; ++k) {
          adj[a[k]] += g * v[a[half + k]];
          adj[a[half + k]] += g * v[a[k]];
        }
        break;
      }
      case OpKind::kSum:
        for (std::uint32_t k = 0; k < n.count; ++k) adj[a[k]] += g;
        break;
    }
  }
  for (std::size_t s = 0; s < input_nodes_.size(); ++s) grad[s] = adj[input_nodes_[s]];
  return v[output_];
}

std::uint64_t Graph::branch_signature(std::span<const double> inputs) const {
  std::vector<double> values;
  forward(inputs, values);
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::uint32_t* a = operands_.data() + n.first;
    if (n.kind == OpKind::kMinimum || n.kind == OpKind::kMaximum) {
      for (std::uint32_t k = 0; k < n.count; ++k) {
        if (values[a[k]] == values[i]) {
          mix(k);
          break;
        }
      }
    } else if (n.kind == OpKind::kClampZero) {
      mix(values[a[0]] > 0.0 ? 1 : 2);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Builder

void GraphBuilder::check(Expr e) const {
  if (e.builder_ != this || e.id_ >= graph_.nodes_.size()) {
    throw InvalidArgument("expression does not belong to this graph builder");
  }
}

Expr GraphBuilder::push(OpKind kind, std::span<const Expr> args, double payload) {
  Graph::Node n{kind, static_cast<std::uint32_t>(graph_.operands_.size()),
                static_cast<std::uint32_t>(args.size()), 0, payload};
  for (const Expr& e : args) {
    check(e);
    graph_.operands_.push_back(e.id_);
  }
  graph_.nodes_.push_back(n);
  return Expr(this, static_cast<std::uint32_t>(graph_.nodes_.size() - 1));
}

Expr GraphBuilder::input() {
  Graph::Node n{OpKind::kInput, static_cast<std::uint32_t>(graph_.input_nodes_.size()), 0, 0, 0.0};
  graph_.nodes_.push_back(n);
  const auto id = static_cast<std::uint32_t>(graph_.nodes_.size() - 1);
  graph_.input_nodes_.push_back(id);
  return Expr(this, id);
}

std::vector<Expr> GraphBuilder::inputs(std::size_t n) {
  std::vector<Expr> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(input());
  return out;
}

Expr GraphBuilder::constant(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("graph constants must be finite");
  if (value == 0.0) value = 0.0;  // fold -0 into +0
  const auto key = std::bit_cast<std::uint64_t>(value);
  if (auto it = constants_.find(key); it != constants_.end()) return Expr(this, it->second);
  Graph::Node n{OpKind::kConstant, 0, 0, 0, value};
  graph_.nodes_.push_back(n);
  const auto id = static_cast<std::uint32_t>(graph_.nodes_.size() - 1);
  constants_.emplace(key, id);
  return Expr(this, id);
}

Expr GraphBuilder::add(Expr a, Expr b) { return push(OpKind::kAdd, std::array{a, b}); }
Expr GraphBuilder::subtract(Expr a, Expr b) { return push(OpKind::kSubtract, std::array{a, b}); }
Expr GraphBuilder::multiply(Expr a, Expr b) { return push(OpKind::kMultiply, std::array{a, b}); }
Expr GraphBuilder::divide(Expr a, Expr b) { return push(OpKind::kDivide, std::array{a, b}); }
Expr GraphBuilder::negate(Expr a) { return push(OpKind::kNegate, std::array{a}); }
Expr GraphBuilder::exp(Expr a) { return push(OpKind::kExp, std::array{a}); }
Expr GraphBuilder::log(Expr a) { return push(OpKind::kLog, std::array{a}); }
Expr GraphBuilder::sqrt(Expr a) { return push(OpKind::kSqrt, std::array{a}); }
Expr GraphBuilder::power(Expr a, double exponent) {
  return push(OpKind::kPower, std::array{a}, exponent);
}
Expr GraphBuilder::clamp_zero(Expr a) { return push(OpKind::kClampZero, std::array{a}); }
Expr GraphBuilder::sigmoid(Expr a) { return push(OpKind::kSigmoid, std::array{a}); }

Expr GraphBuilder::minimum(std::span<const Expr> args) {
  if (args.empty()) throw InvalidArgument("minimum of an empty operand list");
  if (args.size() == 1) return args[0];
  return push(OpKind::kMinimum, args);
}

Expr GraphBuilder::maximum(std::span<const Expr> args) {
  if (args.empty()) throw InvalidArgument("maximum of an empty operand list");
  if (args.size() == 1) return args[0];
  return push(OpKind::kMaximum, args);
}

Expr GraphBuilder::matvec_row(std::span<const double> weights, std::span<const Expr> args) {
  if (weights.size() != args.size()) throw ShapeError("matvec row: weight/operand length mismatch");
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidArgument("matvec weights must be finite");
  }
  Expr e = push(OpKind::kMatVec, args);
  graph_.nodes_.back().weights = static_cast<std::uint32_t>(graph_.weights_.size());
  graph_.weights_.insert(graph_.weights_.end(), weights.begin(), weights.end());
  return e;
}

std::vector<Expr> GraphBuilder::matvec(const Matrix& weights, std::span<const Expr> args) {
  if (static_cast<std::size_t>(weights.cols()) != args.size()) {
    throw ShapeError("matvec: matrix columns do not match operand count");
  }
  std::vector<Expr> out;
  out.reserve(weights.rows());
  std::vector<double> row(args.size());
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) row[c] = weights(r, c);
    out.push_back(matvec_row(row, args));
  }
  return out;
}

Expr GraphBuilder::dot(std::span<const Expr> a, std::span<const Expr> b) {
  if (a.size() != b.size()) throw ShapeError("dot: operand length mismatch");
  if (a.empty()) return constant(0.0);
  std::vector<Expr> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  return push(OpKind::kDot, both);
}

Expr GraphBuilder::sum(std::span<const Expr> args) {
  if (args.empty()) return constant(0.0);
  if (args.size() == 1) return args[0];
  return push(OpKind::kSum, args);
}

Graph GraphBuilder::build(Expr output) {
  check(output);
  graph_.output_ = output.id_;
  Graph g = std::move(graph_);
  graph_ = Graph();
  constants_.clear();
  return g;
}

// ---------------------------------------------------------------------------
// Operators

namespace {
GraphBuilder& owner(Expr a) {
  if (!a.valid()) throw InvalidArgument("operation on an empty expression");
  return *a.builder();
}
}  // namespace

Expr operator+(Expr a, Expr b) { return owner(a).add(a, b); }
Expr operator-(Expr a, Expr b) { return owner(a).subtract(a, b); }
Expr operator*(Expr a, Expr b) { return owner(a).multiply(a, b); }
Expr operator/(Expr a, Expr b) { return owner(a).divide(a, b); }
Expr operator-(Expr a) { return owner(a).negate(a); }
Expr operator+(Expr a, double b) { return owner(a).add(a, owner(a).constant(b)); }
Expr operator-(Expr a, double b) { return owner(a).subtract(a, owner(a).constant(b)); }
Expr operator*(Expr a, double b) { return owner(a).multiply(a, owner(a).constant(b)); }
Expr operator*(double a, Expr b) { return owner(b).multiply(owner(b).constant(a), b); }
Expr exp(Expr a) { return owner(a).exp(a); }
Expr log(Expr a) { return owner(a).log(a); }
Expr sqrt(Expr a) { return owner(a).sqrt(a); }
Expr pow(Expr a, double exponent) { return owner(a).power(a, exponent); }
Expr min(Expr a, Expr b) { return owner(a).minimum(std::array{a, b}); }
Expr max(Expr a, Expr b) { return owner(a).maximum(std::array{a, b}); }
Expr clamp_zero(Expr a) { return owner(a).clamp_zero(a); }
Expr sigmoid(Expr a) { return owner(a).sigmoid(a); }

// ---------------------------------------------------------------------------
// Gradient checking

std::vector<double> gradient_errors(const Graph& graph, std::span<const double> inputs,
                                    double step, bool skip_kinks) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const GradResult reverse = graph.gradient(inputs);
  const double floor = 1e-6 * std::max(1.0, std::abs(reverse.value));
  const std::uint64_t base_sig = skip_kinks ? graph.branch_signature(inputs) : 0;
  std::vector<double> x(inputs.begin(), inputs.end());
  std::vector<double> errors(x.size());
  Workspace ws;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + step;
    const double fp = graph.evaluate(x, ws);
    const bool kink_p = skip_kinks && graph.branch_signature(x) != base_sig;
    x[i] = x0 - step;
    const double fm = graph.evaluate(x, ws);
    const bool kink_m = skip_kinks && graph.branch_signature(x) != base_sig;
    x[i] = x0;
    if (kink_p || kink_m) {
      errors[i] = std::nan("");
      continue;
    }
    const double central = (fp - fm) / (2.0 * step);
    const double a = reverse.gradient[i];
    const double denom = std::max({std::abs(a), std::abs(central), floor});
    errors[i] = std::abs(a - central) / denom;
  }
  return errors;
}

double check_gradient(const Graph& graph, std::span<const double> inputs, double step) {
  double worst = 0.0;
  for (double e : gradient_errors(graph, inputs, step, false)) worst = std::max(worst, e);
  return worst;
}

}  // namespace mobo::ad
