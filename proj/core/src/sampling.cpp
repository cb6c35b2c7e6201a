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

#include "mobo/sampling.h"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace mobo::qmc {

namespace detail {
extern const std::size_t kDirectionTableDims;
extern const std::uint32_t kDirectionDegree[];
extern const std::uint32_t kDirectionCoeffs[];
extern const std::uint32_t kDirectionOffset[];
extern const std::uint32_t kDirectionInit[];
}  // namespace detail

namespace {

constexpr int kBits = 32;

std::uint32_t reverse_bits(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0F0F0F0Fu) | ((x & 0x0F0F0F0Fu) << 4);
  x = ((x >> 8) & 0x00FF00FFu) | ((x & 0x00FF00FFu) << 8);
  return (x >> 16) | (x << 16);
}

// Laine-Karras style permutation: output bit i depends only on input bits <= i,
// so applied to bit-reversed digits it is a nested uniform (Owen) scramble.
std::uint32_t laine_karras(std::uint32_t x, std::uint32_t seed) {
  x ^= x * 0x3d20adeau;
  x += seed;
  x *= (seed >> 16) | 1u;
  x ^= x * 0x05526c56u;
  x ^= x * 0x53a22864u;
  return x;
}

void fill_directions(std::size_t d, std::uint32_t* v) {
  if (d == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = 1u << (kBits - 1 - k);
    return;
  }
  const std::size_t row = d - 1;
  const std::uint32_t s = detail::kDirectionDegree[row];
  const std::uint32_t a = detail::kDirectionCoeffs[row];
  const std::uint32_t* m = detail::kDirectionInit + detail::kDirectionOffset[row];
  for (std::uint32_t k = 0; k < s && k < kBits; ++k) v[k] = m[k] << (kBits - 1 - k);
  for (std::uint32_t k = s; k < kBits; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (std::uint32_t l = 1; l < s; ++l) {
      if ((a >> (s - 1 - l)) & 1u) value ^= v[k - l];
    }
    v[k] = value;
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::size_t max_sobol_dimension() { return detail::kDirectionTableDims; }

SobolEngine::SobolEngine(std::size_t dim, std::uint64_t seed, bool scramble)
    : dim_(dim), scramble_(scramble) {
  if (dim == 0) throw InvalidArgument("Sobol dimension must be >= 1");
  if (dim > max_sobol_dimension()) {
    throw UnsupportedDimension("Sobol dimension " + std::to_string(dim) +
                               " exceeds direction-number table (" +
                               std::to_string(max_sobol_dimension()) + ")");
  }
  directions_.resize(dim * kBits);
  seeds_.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    fill_directions(d, directions_.data() + d * kBits);
    seeds_[d] = static_cast<std::uint32_t>(mix_seed(seed, d));
  }
}

std::uint32_t SobolEngine::digits(std::uint64_t index, std::size_t d) const {
  std::uint64_t gray = index ^ (index >> 1);
  const std::uint32_t* v = directions_.data() + d * kBits;
  std::uint32_t x = 0;
  for (int k = 0; gray != 0 && k < kBits; ++k, gray >>= 1) {
    if (gray & 1u) x ^= v[k];
  }
  if (scramble_) x = reverse_bits(laine_karras(reverse_bits(x), seeds_[d]));
  return x;
}

Matrix SobolEngine::draw(std::size_t count) {
  Matrix out(count, dim_);
  constexpr double kScale = 1.0 / 4294967296.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) out(i, d) = digits(index_ + i, d) * kScale;
  }
  index_ += count;
  return out;
}

Matrix sobol(std::size_t count, std::size_t dim, std::uint64_t seed, bool scramble) {
  if (count == 0) throw InvalidArgument("Sobol count must be >= 1");
  SobolEngine engine(dim, seed, scramble);
  return engine.draw(count);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw InvalidArgument("inverse_normal_cdf: p outside [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against erfc.
  const double e = (x < 0.0 ? normal_cdf(x) - p : -(0.5 * std::erfc(x / std::numbers::sqrt2) - (1.0 - p)));
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

BaseSamples BaseSamples::leading_slots(std::size_t slots) const {
  if (slots > q) throw ShapeError("leading_slots: more slots requested than available");
  BaseSamples out = *this;
  out.q = slots;
  out.data.resize(n * slots * outputs);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < slots; ++i) {
      for (std::size_t o = 0; o < outputs; ++o) {
        out.data[(t * slots + i) * outputs + o] = at(t, i, o);
      }
    }
  }
  return out;
}

BaseSamples normal_base_samples(std::size_t n, std::size_t q, std::size_t outputs,
                                std::uint64_t seed, SampleKind kind) {
  if (n == 0 || q == 0 || outputs == 0) {
    throw InvalidArgument("base samples need N, q, outputs >= 1");
  }
  BaseSamples out{n, q, outputs, seed, kind, std::vector<double>(n * q * outputs)};
  const std::size_t dim = q * outputs;
  if (kind == SampleKind::kQmcNormal) {
    SobolEngine engine(dim, seed, true);
    constexpr double kScale = 1.0 / 4294967296.0;
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < dim; ++k) {
        // Centre each digit cell so that u never hits 0 or 1.
        const double u = (static_cast<double>(engine.digits(t, k)) + 0.5) * kScale;
        out.data[t * dim + k] = inverse_normal_cdf(u);
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    for (double& v : out.data) {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * kScale;
      v = inverse_normal_cdf(u);
    }
  }
  return out;
}

}  // namespace mobo::qmc
