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

#include "mobo/gp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "mobo/lbfgsb.h"
#include "mobo/parallel.h"

namespace mobo::gp {

namespace {

constexpr double kSqrt5 = 2.23606797749979;
constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-4;
constexpr double kPivotRatio = 1e-10;
constexpr int kSchemaVersion = 1;

double matern_of_r(double r) {
  const double a = kSqrt5 * r;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

// Scaled distances between rows of A and B.
Matrix scaled_distance(const Matrix& A, const Matrix& B, const Vector& ls) {
  const Eigen::ArrayXd inv = ls.array().inverse();
  Matrix D(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      D(i, j) = std::sqrt(((A.row(i).array() - B.row(j).array()) * inv.transpose()).square().sum());
    }
  }
  return D;
}

Matrix cross_kernel(const Matrix& A, const Matrix& B, const Hyperparameters& h) {
  Matrix D = scaled_distance(A, B, h.lengthscales);
  return D.unaryExpr([&h](double r) { return h.output_scale * matern_of_r(r); });
}

// A factor is usable when every pivot keeps a meaningful fraction of its
// diagonal; near-duplicate rows otherwise pass with vanishing pivots.
bool usable_factor(const Eigen::LLT<Matrix>& llt, const Matrix& S) {
  if (llt.info() != Eigen::Success) return false;
  const Matrix L = llt.matrixL();
  if (!L.allFinite()) return false;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    if (!(L(i, i) * L(i, i) > kPivotRatio * S(i, i))) return false;
  }
  return true;
}

// Lower Cholesky factor of S with escalating diagonal jitter. Returns false if
// even the largest jitter fails.
bool jittered_cholesky(const Matrix& S, Matrix& L, bool& jittered) {
  jittered = false;
  Eigen::LLT<Matrix> llt(S);
  if (usable_factor(llt, S)) {
    L = llt.matrixL();
    return true;
  }
  const double scale = std::max(S.diagonal().mean(), 1e-300);
  for (double j = kJitterStart; j <= kJitterMax * 1.0000001; j *= 10.0) {
    Matrix Sj = S;
    Sj.diagonal().array() += j * scale;
    llt.compute(Sj);
    if (usable_factor(llt, Sj)) {
      L = llt.matrixL();
      jittered = true;
      return true;
    }
  }
  return false;
}

void build_cache(const Matrix& X, const Vector& y_std_units, OutputModel& out, bool& warned) {
  const Eigen::Index n = X.rows();
  Matrix K = cross_kernel(X, X, out.hyper);
  K.diagonal().array() += out.hyper.noise_variance;
  bool jittered = false;
  if (!jittered_cholesky(K, out.chol, jittered)) {
    throw NotPositiveDefinite("training covariance is not positive definite after jitter");
  }
  warned = warned || jittered;
  out.chol_inv = out.chol.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  out.alpha = out.chol.transpose().triangularView<Eigen::Upper>().solve(
      out.chol.triangularView<Eigen::Lower>().solve(y_std_units));
}

bool is_constant(const Vector& y, double mean, double sd) {
  return y.size() < 2 || !(sd > 1e-10 * std::max(1.0, std::abs(mean)));
}

struct Standardized {
  Vector y;
  double mean;
  double sd;
  bool constant;
};

Standardized standardize(const Vector& raw) {
  Standardized s;
  s.mean = raw.mean();
  const double ss = raw.size() > 1 ? (raw.array() - s.mean).square().sum() / (raw.size() - 1) : 0.0;
  s.sd = std::sqrt(ss);
  s.constant = is_constant(raw, s.mean, s.sd);
  if (s.constant) s.sd = 1.0;
  s.y = (raw.array() - s.mean) / s.sd;
  return s;
}

double prior_lengthscale_center(std::size_t d) { return std::sqrt(static_cast<double>(d)) / 2.0; }

Vector lower_bounds(std::size_t d, const FitConfig& c) {
  Vector lo(d + 2);
  lo.head(d).setConstant(std::log(c.lengthscale_min));
  lo[d] = std::log(c.output_scale_min);
  lo[d + 1] = std::log(c.noise_min);
  return lo;
}

Vector upper_bounds(std::size_t d, const FitConfig& c) {
  Vector hi(d + 2);
  hi.head(d).setConstant(std::log(c.lengthscale_max));
  hi[d] = std::log(c.output_scale_max);
  hi[d + 1] = std::log(c.noise_max);
  return hi;
}

Vector start_point(std::size_t d, int restart, std::mt19937_64& rng, const FitConfig& c) {
  const double center = std::log(prior_lengthscale_center(d));
  Vector theta(d + 2);
  if (restart == 0) {
    theta.head(d).setConstant(center);
    theta[d] = 0.0;
    theta[d + 1] = std::log(1e-4);
  } else {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t k = 0; k < d; ++k) theta[k] = center + 1.5 * u(rng);
    theta[d] = u(rng);
    theta[d + 1] = std::log(1e-6) + (std::log(1e-2) - std::log(1e-6)) * 0.5 * (u(rng) + 1.0);
  }
  const Vector lo = lower_bounds(d, c);
  const Vector hi = upper_bounds(d, c);
  return theta.cwiseMax(lo).cwiseMin(hi);
}

OutputModel fit_output(const Matrix& X, const Vector& raw, const FitConfig& config,
                       std::size_t index, bool& warned) {
  const auto d = static_cast<std::size_t>(X.cols());
  const Standardized s = standardize(raw);
  OutputModel out;
  out.y_mean = s.mean;
  out.y_std = s.sd;
  if (s.constant) {
    out.hyper.lengthscales = Vector::Constant(d, prior_lengthscale_center(d))
                                 .cwiseMax(config.lengthscale_min)
                                 .cwiseMin(config.lengthscale_max);
    out.hyper.output_scale = config.output_scale_min;
    out.hyper.noise_variance = config.noise_min;
    out.diagnostics.skipped = true;
    build_cache(X, s.y, out, warned);
    return out;
  }
  std::mt19937_64 rng(qmc::mix_seed(config.seed, index));
  const Vector lo = lower_bounds(d, config);
  const Vector hi = upper_bounds(d, config);
  opt::LbfgsbOptions options;
  options.max_iterations = config.max_iterations;
  auto objective = [&](const Vector& theta, Vector& grad) {
    return negative_log_posterior(X, s.y, theta, config, &grad);
  };
  double best = std::numeric_limits<double>::infinity();
  Vector best_theta;
  for (int r = 0; r < std::max(config.restarts, 1); ++r) {
    const Vector theta0 = start_point(d, r, rng, config);
    double f0 = std::numeric_limits<double>::infinity();
    try {
      f0 = negative_log_posterior(X, s.y, theta0, config, nullptr);
    } catch (const Error&) {
    }
    out.diagnostics.start_objectives.push_back(f0);
    opt::LbfgsbResult res = opt::lbfgsb_minimize(objective, theta0, lo, hi, options);
    double f_end = res.f;
    Vector theta_end = res.x;
    if (!(f_end <= f0)) {
      f_end = f0;
      theta_end = theta0;
    }
    out.diagnostics.end_objectives.push_back(f_end);
    if (f_end < best) {
      best = f_end;
      best_theta = theta_end;
    }
  }
  if (!std::isfinite(best)) {
    throw NotPositiveDefinite("no hyperparameter restart produced a finite objective");
  }
  out.diagnostics.objective = best;
  out.hyper = unpack(std::span<const double>(best_theta.data(), best_theta.size()));
  build_cache(X, s.y, out, warned);
  return out;
}

}  // namespace

void validate(const Dataset& data) {
  if (data.X.rows() < 1) throw InvalidArgument("dataset needs at least one row");
  if (data.X.cols() < 1) throw InvalidArgument("dataset needs at least one input dimension");
  if (data.Y.rows() != data.X.rows()) throw ShapeError("X and Y row counts differ");
  if (data.Y.cols() < 1) throw InvalidArgument("dataset needs at least one output");
  if (!data.X.allFinite() || !data.Y.allFinite()) throw InvalidArgument("dataset entries must be finite");
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < data.X.rows(); ++j) {
      if ((data.X.row(i) - data.X.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
        throw InvalidArgument("duplicate input rows " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
  }
}

double kernel_matern52(std::span<const double> x, std::span<const double> x2,
                       std::span<const double> lengthscales, double output_scale) {
  if (x.size() != x2.size() || x.size() != lengthscales.size()) {
    throw ShapeError("kernel inputs and lengthscales must have equal length");
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(lengthscales[k] > 0.0)) throw InvalidArgument("lengthscales must be positive");
    const double z = (x[k] - x2[k]) / lengthscales[k];
    r2 += z * z;
  }
  return output_scale * matern_of_r(std::sqrt(r2));
}

Vector pack(const Hyperparameters& h) {
  const Eigen::Index d = h.lengthscales.size();
  Vector theta(d + 2);
  theta.head(d) = h.lengthscales.array().log().matrix();
  theta[d] = std::log(h.output_scale);
  theta[d + 1] = std::log(h.noise_variance);
  return theta;
}

Hyperparameters unpack(std::span<const double> theta) {
  if (theta.size() < 3) throw ShapeError("packed hyperparameters need d + 2 entries");
  const std::size_t d = theta.size() - 2;
  Hyperparameters h;
  h.lengthscales.resize(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) h.lengthscales[static_cast<Eigen::Index>(k)] = std::exp(theta[k]);
  h.output_scale = std::exp(theta[d]);
  h.noise_variance = std::exp(theta[d + 1]);
  return h;
}

double log_marginal_likelihood(const Matrix& X, const Vector& y, const Hyperparameters& h) {
  Matrix K = cross_kernel(X, X, h);
  K.diagonal().array() += h.noise_variance;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("kernel matrix not positive definite");
  const Vector alpha = llt.solve(y);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * logdet -
         0.5 * static_cast<double>(X.rows()) * std::log(2.0 * std::numbers::pi);
}

double negative_log_posterior(const Matrix& X, const Vector& y, const Vector& theta,
                              const FitConfig& config, Vector* grad) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (theta.size() != d + 2) throw ShapeError("packed hyperparameters need d + 2 entries");
  const Hyperparameters h = unpack(std::span<const double>(theta.data(), theta.size()));
  const Matrix R = scaled_distance(X, X, h.lengthscales);
  const Matrix Kt = R.unaryExpr([](double r) { return matern_of_r(r); });
  Matrix K = h.output_scale * Kt;
  K.diagonal().array() += h.noise_variance;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("kernel matrix not positive definite");
  const Matrix L = llt.matrixL();
  if (!L.allFinite()) throw NotPositiveDefinite("kernel matrix not positive definite");
  const Vector alpha = llt.solve(y);
  const double nll = 0.5 * y.dot(alpha) + L.diagonal().array().log().sum() +
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  const double mu = std::log(prior_lengthscale_center(static_cast<std::size_t>(d)));
  const double sl2 = config.lengthscale_log_sd * config.lengthscale_log_sd;
  const double so2 = config.output_scale_log_sd * config.output_scale_log_sd;
  double prior = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) prior += 0.5 * (theta[k] - mu) * (theta[k] - mu) / sl2;
  prior += 0.5 * theta[d] * theta[d] / so2;
  const double value = nll + prior;
  if (!std::isfinite(value)) throw NotPositiveDefinite("non-finite negative log posterior");

  if (grad != nullptr) {
    grad->resize(d + 2);
    const Matrix W = llt.solve(Matrix::Identity(n, n)) - alpha * alpha.transpose();
    for (Eigen::Index k = 0; k < d; ++k) {
      const double inv = 1.0 / h.lengthscales[k];
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double r = R(i, j);
          const double delta = (X(i, k) - X(j, k)) * inv;
          const double dk = h.output_scale * (5.0 / 3.0) * (1.0 + kSqrt5 * r) *
                            std::exp(-kSqrt5 * r) * delta * delta;
          acc += W(i, j) * dk;
        }
      }
      (*grad)[k] = 0.5 * acc + (theta[k] - mu) / sl2;
    }
    (*grad)[d] = 0.5 * (W.array() * (h.output_scale * Kt).array()).sum() + theta[d] / so2;
    (*grad)[d + 1] = 0.5 * W.trace() * h.noise_variance;
  }
  return value;
}

GpModel::GpModel(Dataset data, std::vector<OutputModel> outputs, bool jitter_warning)
    : data_(std::move(data)), outputs_(std::move(outputs)), jitter_warning_(jitter_warning) {}

void GpModel::predict(const Matrix& Xcand, Matrix& mean, Matrix& variance) const {
  if (static_cast<std::size_t>(Xcand.cols()) != dim()) throw ShapeError("candidate dimension mismatch");
  const Eigen::Index q = Xcand.rows();
  mean.resize(q, static_cast<Eigen::Index>(num_outputs()));
  variance.resize(q, static_cast<Eigen::Index>(num_outputs()));
  for (std::size_t o = 0; o < num_outputs(); ++o) {
    const OutputModel& m = outputs_[o];
    const Matrix Ks = cross_kernel(Xcand, data_.X, m.hyper);
    const Matrix V = m.chol_inv * Ks.transpose();
    const auto col = static_cast<Eigen::Index>(o);
    mean.col(col) = (Ks * m.alpha).array() * m.y_std + m.y_mean;
    variance.col(col) =
        ((m.hyper.output_scale - V.colwise().squaredNorm().transpose().array()).max(0.0)) *
        (m.y_std * m.y_std);
  }
}

GpModel fit(const Dataset& data, const FitConfig& config) {
  validate(data);
  const auto outputs = static_cast<std::size_t>(data.Y.cols());
  std::vector<OutputModel> models(outputs);
  std::vector<char> warned(outputs, 0);
  parallel_for(outputs, [&](std::size_t o) {
    bool w = false;
    models[o] = fit_output(data.X, data.Y.col(static_cast<Eigen::Index>(o)), config, o, w);
    warned[o] = w;
  });
  return GpModel(data, std::move(models),
                 std::any_of(warned.begin(), warned.end(), [](char c) { return c != 0; }));
}

GpModel condition(const Dataset& data, const std::vector<Hyperparameters>& hypers) {
  validate(data);
  if (hypers.size() != static_cast<std::size_t>(data.Y.cols())) {
    throw ShapeError("one hyperparameter set per output required");
  }
  std::vector<OutputModel> models(hypers.size());
  bool warned = false;
  for (std::size_t o = 0; o < hypers.size(); ++o) {
    if (hypers[o].lengthscales.size() != data.X.cols()) throw ShapeError("lengthscale count mismatch");
    const Standardized s = standardize(data.Y.col(static_cast<Eigen::Index>(o)));
    models[o].y_mean = s.mean;
    models[o].y_std = s.sd;
    models[o].hyper = hypers[o];
    build_cache(data.X, s.y, models[o], warned);
  }
  return GpModel(data, std::move(models), warned);
}

Posterior posterior(const GpModel& model, const Matrix& Xcand) {
  if (Xcand.rows() < 1) throw InvalidArgument("posterior needs at least one candidate");
  if (static_cast<std::size_t>(Xcand.cols()) != model.dim()) {
    throw ShapeError("candidate dimension mismatch");
  }
  const auto q = static_cast<std::size_t>(Xcand.rows());
  const std::size_t O = model.num_outputs();
  Posterior post;
  post.q = q;
  post.outputs = O;
  const auto total = static_cast<Eigen::Index>(q * O);
  post.mean = Vector::Zero(total);
  post.covariance = Matrix::Zero(total, total);
  post.root = Matrix::Zero(total, total);
  for (std::size_t o = 0; o < O; ++o) {
    const OutputModel& m = model.output(o);
    const Matrix Ks = cross_kernel(Xcand, model.data().X, m.hyper);
    const Matrix V = m.chol_inv * Ks.transpose();
    const double s2 = m.y_std * m.y_std;
    const Vector mu = (Ks * m.alpha).array() * m.y_std + m.y_mean;
    Matrix C = (cross_kernel(Xcand, Xcand, m.hyper) - V.transpose() * V) * s2;
    C = 0.5 * (C + C.transpose());
    Matrix L;
    bool jittered = false;
    if (!jittered_cholesky(C, L, jittered)) {
      throw NotPositiveDefinite("posterior covariance is not positive definite after jitter");
    }
    post.jitter_warning = post.jitter_warning || jittered;
    for (std::size_t i = 0; i < q; ++i) {
      const auto a = static_cast<Eigen::Index>(i * O + o);
      post.mean[a] = mu[static_cast<Eigen::Index>(i)];
      for (std::size_t j = 0; j < q; ++j) {
        const auto b = static_cast<Eigen::Index>(j * O + o);
        post.covariance(a, b) = C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        post.root(a, b) = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return post;
}

Matrix sample(const Posterior& post, const qmc::BaseSamples& base) {
  if (base.q != post.q || base.outputs != post.outputs) {
    throw ShapeError("base samples do not match posterior shape");
  }
  const auto dim = static_cast<Eigen::Index>(post.q * post.outputs);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> eps(
      base.data.data(), static_cast<Eigen::Index>(base.n), dim);
  Matrix out = eps * post.root.transpose();
  out.rowwise() += post.mean.transpose();
  return out;
}

nlohmann::json to_json(const GpModel& model) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dim"] = model.dim();
  nlohmann::json outs = nlohmann::json::array();
  for (std::size_t o = 0; o < model.num_outputs(); ++o) {
    const OutputModel& m = model.output(o);
    nlohmann::json j;
    j["lengthscales"] = std::vector<double>(m.hyper.lengthscales.data(),
                                            m.hyper.lengthscales.data() + m.hyper.lengthscales.size());
    j["output_scale"] = m.hyper.output_scale;
    j["noise_variance"] = m.hyper.noise_variance;
    j["y_mean"] = m.y_mean;
    j["y_std"] = m.y_std;
    outs.push_back(std::move(j));
  }
  doc["outputs"] = std::move(outs);
  return doc;
}

GpModel from_json(const nlohmann::json& doc, Dataset data) {
  validate(data);
  if (doc.value("schema_version", 0) != kSchemaVersion) {
    throw InvalidArgument("unsupported GP model schema version");
  }
  const auto& outs = doc.at("outputs");
  if (outs.size() != static_cast<std::size_t>(data.Y.cols())) {
    throw ShapeError("model output count does not match dataset");
  }
  std::vector<OutputModel> models(outs.size());
  bool warned = false;
  for (std::size_t o = 0; o < outs.size(); ++o) {
    const auto& j = outs[o];
    const auto ls = j.at("lengthscales").get<std::vector<double>>();
    if (ls.size() != static_cast<std::size_t>(data.X.cols())) throw ShapeError("lengthscale count mismatch");
    OutputModel& m = models[o];
    m.hyper.lengthscales = Eigen::Map<const Vector>(ls.data(), static_cast<Eigen::Index>(ls.size()));
    m.hyper.output_scale = j.at("output_scale").get<double>();
    m.hyper.noise_variance = j.at("noise_variance").get<double>();
    m.y_mean = j.at("y_mean").get<double>();
    m.y_std = j.at("y_std").get<double>();
    const Vector y = (data.Y.col(static_cast<Eigen::Index>(o)).array() - m.y_mean) / m.y_std;
    build_cache(data.X, y, m, warned);
  }
  return GpModel(std::move(data), std::move(models), warned);
}

}  // namespace mobo::gp
