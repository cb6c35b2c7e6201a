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

// Small deterministic thread fan-out. The worker count comes from the
// MOBO_NUM_THREADS environment variable (default 1).

#ifndef MOBO_PARALLEL_H_
#define MOBO_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace mobo {

std::size_t num_threads();

// Calls fn(i) for i in [0, n). Work items must write to disjoint outputs; the
// first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mobo

#endif  // MOBO_PARALLEL_H_
