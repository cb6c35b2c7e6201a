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

// Scrambled Sobol sequences and standard-normal base samples.

#ifndef MOBO_SAMPLING_H_
#define MOBO_SAMPLING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mobo/error.h"
#include "mobo/types.h"

namespace mobo::qmc {

// Largest dimension covered by the embedded Joe-Kuo direction numbers.
std::size_t max_sobol_dimension();

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

// Sobol generator in Gray-code order with optional hash-based Owen
// scrambling. Cheap to copy; each copy advances independently.
class SobolEngine {
 public:
  SobolEngine(std::size_t dim, std::uint64_t seed, bool scramble = true);

  std::size_t dim() const { return dim_; }
  std::uint64_t position() const { return index_; }

  // Next `count` points as a count x dim matrix with entries in [0, 1).
  Matrix draw(std::size_t count);
  void skip(std::uint64_t count) { index_ += count; }

  // Raw 32-bit digits of point `index` in dimension `d` (after scrambling).
  std::uint32_t digits(std::uint64_t index, std::size_t d) const;

 private:
  std::size_t dim_;
  bool scramble_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> directions_;  // dim_ x 32
  std::vector<std::uint32_t> seeds_;
};

// count points of a (scrambled) Sobol sequence in [0, 1)^dim.
Matrix sobol(std::size_t count, std::size_t dim, std::uint64_t seed, bool scramble = true);

double normal_cdf(double x);
// Acklam's rational approximation refined with one Halley step.
double inverse_normal_cdf(double p);

enum class SampleKind { kIidNormal, kQmcNormal };

// Tensor of standard-normal draws with shape n x q x outputs (row-major).
struct BaseSamples {
  std::size_t n = 0;
  std::size_t q = 0;
  std::size_t outputs = 0;
  std::uint64_t seed = 0;
  SampleKind kind = SampleKind::kQmcNormal;
  std::vector<double> data;

  double at(std::size_t t, std::size_t i, std::size_t o) const {
    return data[(t * q + i) * outputs + o];
  }
  // Copy of the first `slots` candidate slots of every sample.
  BaseSamples leading_slots(std::size_t slots) const;
};

BaseSamples normal_base_samples(std::size_t n, std::size_t q, std::size_t outputs,
                                std::uint64_t seed, SampleKind kind);

// SplitMix64 step; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mobo::qmc

#endif  // MOBO_SAMPLING_H_
