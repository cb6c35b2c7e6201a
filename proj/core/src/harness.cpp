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

#include "mobo/harness.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "mobo/acquisition.h"
#include "mobo/gp.h"
#include "mobo/parallel.h"
#include "mobo/sampling.h"

namespace mobo::harness {

namespace {

enum Stream : std::uint64_t {
  kNoiseStream = 1,
  kFallbackStream = 2,
  kFitStream = 3,
  kBaseStream = 4,
  kOptStream = 5,
  kWeightStream = 6,
};

constexpr double kDuplicateTolerance = 1e-8;

std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t iteration) {
  return qmc::mix_seed(qmc::mix_seed(seed, s), iteration);
}

Matrix feasible_rows(const Matrix& Y, const Matrix& C) {
  Matrix out(Y.rows(), Y.cols());
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    if (C.cols() == 0 || (C.row(i).array() >= 0.0).all()) out.row(n++) = Y.row(i);
  }
  return out.topRows(n);
}

void append(Matrix& m, const Matrix& rows) {
  const Eigen::Index old = m.rows();
  m.conservativeResize(old + rows.rows(), rows.cols());
  m.bottomRows(rows.rows()) = rows;
}

bool near_any(const Matrix& X, Eigen::Index rows, const Eigen::RowVectorXd& x) {
  for (Eigen::Index i = 0; i < rows; ++i) {
    if ((X.row(i) - x).cwiseAbs().maxCoeff() <= kDuplicateTolerance) return true;
  }
  return false;
}

class Loop {
 public:
  explicit Loop(const ExperimentConfig& config)
      : config_(config),
        problem_(problems::make_problem(config.problem)),
        observed_(config.noise > 0.0 ? problems::with_noise(problem_, config.noise,
                                                            qmc::mix_seed(config.seed, kNoiseStream))
                                     : problem_),
        design_(problem_.d, config.seed),
        fallback_(problem_.d, qmc::mix_seed(config.seed, kFallbackStream)) {
    const auto d = static_cast<Eigen::Index>(problem_.d);
    X_.resize(0, d);
    Y_.resize(0, static_cast<Eigen::Index>(problem_.M));
    C_.resize(0, static_cast<Eigen::Index>(problem_.V));
    Ytrue_ = Y_;
    Ctrue_ = C_;
  }

  BoTrace run() {
    BoTrace trace;
    trace.config = config_;
    const std::size_t n_init = initial_design_size(problem_.d);
    IterationRecord first;
    observe(design_.draw(n_init), first);
    trace.records.push_back(std::move(first));
    for (std::size_t it = 1; static_cast<std::size_t>(X_.rows()) < config_.budget; ++it) {
      const std::size_t q = std::min(config_.q, config_.budget - static_cast<std::size_t>(X_.rows()));
      IterationRecord rec;
      rec.iteration = it;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<Matrix> U_alternatives;
      Matrix U = propose(it, q, rec.warnings, U_alternatives);
      rec.acq_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      deduplicate(U, U_alternatives, rec.warnings);
      observe(U, rec);
      trace.records.push_back(std::move(rec));
    }
    return trace;
  }

 private:
  void observe(const Matrix& U, IterationRecord& rec) {
    const Eigen::Index b = U.rows();
    rec.candidates.resize(b, X_.cols());
    rec.objectives.resize(b, Y_.cols());
    rec.constraints.resize(b, C_.cols());
    Matrix yt(b, Y_.cols()), ct(b, C_.cols());
    for (Eigen::Index i = 0; i < b; ++i) {
      const Vector x = problem_.from_unit(U.row(i).transpose());
      rec.candidates.row(i) = x.transpose();
      const problems::Evaluation e = observed_.evaluate(x);
      rec.objectives.row(i) = e.objectives.transpose();
      rec.constraints.row(i) = e.constraints.transpose();
      if (config_.noise > 0.0) {
        const problems::Evaluation t = problem_.evaluate(x);
        yt.row(i) = t.objectives.transpose();
        ct.row(i) = t.constraints.transpose();
      } else {
        yt.row(i) = e.objectives.transpose();
        ct.row(i) = e.constraints.transpose();
      }
    }
    append(X_, U);
    append(Y_, rec.objectives);
    append(C_, rec.constraints);
    append(Ytrue_, yt);
    append(Ctrue_, ct);
    rec.evaluations = static_cast<std::size_t>(X_.rows());
    const pareto::ParetoFront front(feasible_rows(Ytrue_, Ctrue_), problem_.ref_point);
    rec.front = front.points();
    rec.hv = pareto::hypervolume(front);
    rec.log_hv_diff = problem_.true_front_hv ? log_hv_difference(*problem_.true_front_hv, front)
                                             : std::numeric_limits<double>::quiet_NaN();
  }

  bool has_duplicate(const Matrix& U) const {
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      if (near_any(X_, X_.rows(), U.row(i)) || near_any(U, i, U.row(i))) return true;
    }
    return false;
  }

  // Prefers the best optimizer restart without repeated points, then replaces
  // remaining repeats by Sobol points.
  void deduplicate(Matrix& U, const std::vector<Matrix>& alternatives,
                   std::vector<std::string>& warnings) {
    if (!has_duplicate(U)) return;
    for (const Matrix& alt : alternatives) {
      if (!has_duplicate(alt)) {
        warnings.push_back("best batch repeats an earlier point; using the next best restart");
        U = alt;
        return;
      }
    }
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      int tries = 0;
      while (near_any(X_, X_.rows(), U.row(i)) || near_any(U, i, U.row(i))) {
        U.row(i) = fallback_.draw(1).row(0);
        if (++tries == 1) {
          warnings.push_back("candidate " + std::to_string(i) +
                             " duplicates an earlier point; replaced by a Sobol point");
        }
      }
    }
  }

  Matrix propose(std::size_t it, std::size_t q, std::vector<std::string>& warnings,
                 std::vector<Matrix>& alternatives) {
    if (config_.method == Method::kSobol) return design_.draw(q);
    try {
      return acquire(it, q, warnings, alternatives);
    } catch (const Error& e) {
      warnings.push_back(std::string("acquisition failed (") + e.what() +
                         "); using Sobol candidates");
      return fallback_.draw(q);
    }
  }

  Matrix acquire(std::size_t it, std::size_t q, std::vector<std::string>& warnings,
                 std::vector<Matrix>& alternatives) {
    const std::size_t M = problem_.M;
    const std::size_t V = problem_.V;
    gp::Dataset data;
    data.X = X_;
    data.Y.resize(Y_.rows(), static_cast<Eigen::Index>(M + V));
    data.Y << Y_, C_;
    gp::FitConfig fit_config;
    fit_config.seed = stream_seed(config_.seed, kFitStream, it);
    const gp::GpModel model = gp::fit(data, fit_config);
    if (model.jitter_warning()) warnings.push_back("GP training covariance needed jitter");

    const Matrix feasible = feasible_rows(Y_, C_);
    Vector ref = problem_.ref_point;
    if (config_.infer_ref) ref = pareto::infer_reference_point(feasible.rows() > 0 ? feasible : Y_);
    const pareto::BoxDecomposition decomp =
        pareto::box_decompose(pareto::ParetoFront(feasible, ref), config_.zeta);

    optim::OptConfig opt = config_.opt;
    opt.seed = stream_seed(config_.seed, kOptStream, it);
    const qmc::BaseSamples base = acq::make_base_samples(
        config_.mc_samples, 0, q, M + V, stream_seed(config_.seed, kBaseStream, it));

    optim::OptResult result;
    if (config_.method == Method::kQehvi) {
      auto build = [&](std::size_t batch, const Matrix& pending, const qmc::BaseSamples& b) {
        acq::AcqConfig ac;
        ac.base = b;
        ac.ref = ref;
        ac.pending = pending;
        return V > 0 ? acq::qehvi_constrained(model, batch, decomp, ac)
                     : acq::qehvi(model, batch, decomp, ac);
      };
      if (config_.mode == Mode::kJoint || q == 1) {
        result = optim::optimize_joint(build(q, Matrix(0, X_.cols()), base), opt);
        std::vector<std::size_t> order(result.restarts.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return result.restarts[a].value > result.restarts[b].value;
        });
        for (std::size_t r : order) alternatives.push_back(result.restarts[r].X);
      } else {
        result = optim::optimize_sequential_greedy(
            [&](const Matrix& pending, std::size_t step) {
              return build(1, pending, base.leading_slots(step + 1));
            },
            opt, q);
      }
    } else {
      // One random scalarization per candidate, selected greedily.
      acq::ScalarizationConfig s;
      s.lower = Y_.colwise().minCoeff().transpose();
      s.upper = Y_.colwise().maxCoeff().transpose();
      result = optim::optimize_sequential_greedy(
          [&](const Matrix& pending, std::size_t step) {
            acq::ScalarizationConfig sc = s;
            sc.weights = acq::sample_simplex(M, qmc::mix_seed(
                                                    stream_seed(config_.seed, kWeightStream, it), step));
            acq::AcqConfig ac;
            ac.base = base.leading_slots(step + 1);
            ac.ref = ref;
            ac.pending = pending;
            return acq::qparego(model, sc, ac, acq::parego_incumbent(data.Y, M, sc));
          },
          opt, q);
    }
    if (result.degraded) warnings.push_back("every optimizer restart failed");
    return result.X;
  }

  ExperimentConfig config_;
  problems::ProblemSpec problem_;
  problems::ProblemSpec observed_;
  qmc::SobolEngine design_;
  qmc::SobolEngine fallback_;
  Matrix X_;  // unit cube
  Matrix Y_;
  Matrix C_;
  Matrix Ytrue_;
  Matrix Ctrue_;
};

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kQehvi:
      return "qehvi";
    case Method::kQparego:
      return "qparego";
    case Method::kSobol:
      return "sobol";
  }
  return "?";
}

std::string_view to_string(Mode m) {
  return m == Mode::kJoint ? "joint" : "sequential-greedy";
}

Method parse_method(std::string_view s) {
  if (s == "qehvi") return Method::kQehvi;
  if (s == "qparego") return Method::kQparego;
  if (s == "sobol") return Method::kSobol;
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "joint") return Mode::kJoint;
  if (s == "sequential-greedy" || s == "greedy") return Mode::kSequentialGreedy;
  throw InvalidArgument("unknown mode '" + std::string(s) + "'");
}

std::size_t initial_design_size(std::size_t d) { return 2 * (d + 1); }

void validate(const ExperimentConfig& config) {
  const problems::ProblemSpec p = problems::make_problem(config.problem);
  if (config.q < 1) throw InvalidArgument("q must be >= 1");
  if (config.q > pareto::kDefaultMaxBatch) throw InvalidArgument("q exceeds the maximum batch");
  if (config.budget < initial_design_size(p.d)) {
    throw InvalidArgument("budget " + std::to_string(config.budget) +
                          " is smaller than the initial design of " +
                          std::to_string(initial_design_size(p.d)));
  }
  if (config.mc_samples < 1) throw InvalidArgument("mc_samples must be >= 1");
  if (!(config.zeta >= 0.0 && config.zeta < 1.0)) throw InvalidArgument("zeta must be in [0, 1)");
  if (!(config.noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
}

BoTrace run_bo(const ExperimentConfig& config) {
  validate(config);
  return Loop(config).run();
}

double log_hv_difference(double true_hv, const pareto::ParetoFront& front) {
  return std::log10(std::max(true_hv - pareto::hypervolume(front), kLogHvFloor));
}

std::vector<BoTrace> sweep(const SweepConfig& config) {
  std::vector<ExperimentConfig> trials;
  for (Method m : config.methods) {
    for (std::uint64_t s : config.seeds) {
      ExperimentConfig c = config.base;
      c.method = m;
      c.seed = s;
      validate(c);
      trials.push_back(std::move(c));
    }
  }
  std::vector<BoTrace> out(trials.size());
  parallel_for(trials.size(), [&](std::size_t i) { out[i] = run_bo(trials[i]); });
  return out;
}

}  // namespace mobo::harness
