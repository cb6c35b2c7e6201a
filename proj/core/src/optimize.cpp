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

#include "mobo/optimize.h"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <string>

#include "mobo/lbfgsb.h"
#include "mobo/parallel.h"
#include "mobo/sampling.h"

namespace mobo::optim {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Box {
  Vector lower;  // flattened q * d
  Vector upper;
};

Matrix resolved_bounds(const OptConfig& config, std::size_t d) {
  if (config.bounds.size() == 0) {
    Matrix b(static_cast<Eigen::Index>(d), 2);
    b.col(0).setZero();
    b.col(1).setOnes();
    return b;
  }
  if (static_cast<std::size_t>(config.bounds.rows()) != d || config.bounds.cols() != 2) {
    throw ShapeError("bounds must be d x 2");
  }
  for (Eigen::Index k = 0; k < config.bounds.rows(); ++k) {
    if (!(config.bounds(k, 0) < config.bounds(k, 1))) {
      throw InvalidArgument("bounds need lower < upper in every dimension");
    }
  }
  return config.bounds;
}

Box flat_box(const Matrix& bounds, std::size_t q) {
  const auto d = bounds.rows();
  Box box{Vector(d * static_cast<Eigen::Index>(q)), Vector(d * static_cast<Eigen::Index>(q))};
  for (std::size_t i = 0; i < q; ++i) {
    box.lower.segment(static_cast<Eigen::Index>(i) * d, d) = bounds.col(0);
    box.upper.segment(static_cast<Eigen::Index>(i) * d, d) = bounds.col(1);
  }
  return box;
}

void check_config(const OptConfig& c) {
  if (c.restarts < 1) throw InvalidArgument("restarts must be >= 1");
  if (c.raw_samples < c.restarts) throw InvalidArgument("raw_samples must be >= restarts");
  if (c.max_iterations < 0) throw InvalidArgument("max_iterations must be >= 0");
  if (!(c.fd_step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
}

Matrix unflatten(const Vector& x, std::size_t q, std::size_t d) {
  Matrix X(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          x[static_cast<Eigen::Index>(i * d + k)];
    }
  }
  return X;
}

Vector flatten(const Matrix& X) {
  const RowMatrix r = X;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

double safe_value(const acq::Acquisition& acqf, const Vector& x) {
  try {
    return acqf.evaluate(std::span<const double>(x.data(), x.size()));
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

RestartResult run_restart(const acq::Acquisition& acqf, const Matrix& start, const Box& box,
                          const OptConfig& config) {
  const std::size_t q = acqf.q();
  const std::size_t d = acqf.dim();
  RestartResult out;
  std::size_t evaluations = 0;
  ad::Workspace ws;
  opt::Objective f = [&](const Vector& x, Vector& grad) {
    grad.resize(x.size());
    if (config.gradient == GradientMode::kExact) {
      ++evaluations;
      const double v = acqf.evaluate(std::span<const double>(x.data(), x.size()),
                                     std::span<double>(grad.data(), grad.size()), ws);
      grad = -grad;
      out.progress.emplace_back(evaluations, v);
      return -v;
    }
    ++evaluations;
    const double v = acqf.evaluate(std::span<const double>(x.data(), x.size()));
    Vector probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      // Stencils stay inside the box.
      const double hi = std::min(x[k] + config.fd_step, box.upper[k]);
      const double lo = std::max(x[k] - config.fd_step, box.lower[k]);
      probe[k] = hi;
      const double fp = acqf.evaluate(std::span<const double>(probe.data(), probe.size()));
      probe[k] = lo;
      const double fm = acqf.evaluate(std::span<const double>(probe.data(), probe.size()));
      probe[k] = x[k];
      evaluations += 2;
      grad[k] = -(fp - fm) / (hi - lo);
    }
    out.progress.emplace_back(evaluations, v);
    return -v;
  };
  const Vector x0 = flatten(start).cwiseMax(box.lower).cwiseMin(box.upper);
  out.initial_value = safe_value(acqf, x0);
  ++evaluations;
  out.progress.emplace_back(evaluations, out.initial_value);
  opt::LbfgsbOptions options;
  options.max_iterations = config.max_iterations;
  opt::LbfgsbResult r = opt::lbfgsb_minimize(f, x0, box.lower, box.upper, options);
  out.iterations = r.iterations;
  out.failed = r.status == opt::LbfgsbStatus::kLineSearchFailed ||
               r.status == opt::LbfgsbStatus::kEvaluationFailed;
  Vector best = r.x.cwiseMax(box.lower).cwiseMin(box.upper);
  double value = std::isfinite(r.f) ? -r.f : -std::numeric_limits<double>::infinity();
  if (!(value >= out.initial_value)) {
    best = x0;
    value = out.initial_value;
  }
  out.X = unflatten(best, q, d);
  out.value = value;
  out.evaluations = evaluations;
  return out;
}

}  // namespace

std::vector<Matrix> generate_initial_conditions(const acq::Acquisition& acqf,
                                                const OptConfig& config) {
  check_config(config);
  const std::size_t q = acqf.q();
  const std::size_t d = acqf.dim();
  const Matrix bounds = resolved_bounds(config, d);
  const Box box = flat_box(bounds, q);
  const Matrix raw = qmc::sobol(config.raw_samples, q * d, config.seed);
  const Vector width = box.upper - box.lower;
  std::vector<double> values(config.raw_samples);
  std::vector<Vector> points(config.raw_samples);
  parallel_for(config.raw_samples, [&](std::size_t i) {
    points[i] = box.lower + raw.row(static_cast<Eigen::Index>(i)).transpose().cwiseProduct(width);
    values[i] = safe_value(acqf, points[i]);
  });
  std::vector<std::size_t> order(config.raw_samples);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<Matrix> out;
  out.reserve(config.restarts);
  for (std::size_t r = 0; r < config.restarts; ++r) out.push_back(unflatten(points[order[r]], q, d));
  return out;
}

OptResult optimize_from(const acq::Acquisition& acqf, const std::vector<Matrix>& starts,
                        const OptConfig& config) {
  check_config(config);
  if (starts.empty()) throw InvalidArgument("optimization needs at least one start");
  const Matrix bounds = resolved_bounds(config, acqf.dim());
  const Box box = flat_box(bounds, acqf.q());
  OptResult out;
  out.restarts.resize(starts.size());
  parallel_for(starts.size(), [&](std::size_t r) {
    if (static_cast<std::size_t>(starts[r].rows()) != acqf.q() ||
        static_cast<std::size_t>(starts[r].cols()) != acqf.dim()) {
      throw ShapeError("start batch has the wrong shape");
    }
    out.restarts[r] = run_restart(acqf, starts[r], box, config);
  });
  std::size_t best = 0;
  bool all_failed = true;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    out.evaluations += out.restarts[r].evaluations;
    all_failed = all_failed && out.restarts[r].failed;
    if (out.restarts[r].value > out.restarts[best].value) best = r;
  }
  out.X = out.restarts[best].X;
  out.value = out.restarts[best].value;
  out.degraded = all_failed;
  return out;
}

OptResult optimize_joint(const acq::Acquisition& acqf, const OptConfig& config) {
  const std::vector<Matrix> starts = generate_initial_conditions(acqf, config);
  OptResult out = optimize_from(acqf, starts, config);
  out.evaluations += config.raw_samples;
  return out;
}

OptResult optimize_sequential_greedy(const AcquisitionFamily& family, const OptConfig& config,
                                     std::size_t q) {
  if (q == 0) throw InvalidArgument("greedy batch needs q >= 1");
  OptResult out;
  Matrix chosen;
  for (std::size_t step = 0; step < q; ++step) {
    const acq::Acquisition acqf = family(chosen, step);
    if (acqf.q() != 1) throw ShapeError("greedy steps optimize one candidate at a time");
    OptConfig step_config = config;
    step_config.seed = step == 0 ? config.seed : qmc::mix_seed(config.seed, step);
    OptResult r = optimize_joint(acqf, step_config);
    Matrix next(chosen.rows() + 1, static_cast<Eigen::Index>(acqf.dim()));
    if (chosen.rows() > 0) next.topRows(chosen.rows()) = chosen;
    next.bottomRows(1) = r.X;
    chosen = std::move(next);
    out.marginal_values.push_back(r.value);
    out.value += r.value;
    out.evaluations += r.evaluations;
    out.degraded = out.degraded || r.degraded;
    out.restarts.insert(out.restarts.end(), r.restarts.begin(), r.restarts.end());
  }
  out.X = chosen;
  return out;
}

}  // namespace mobo::optim
