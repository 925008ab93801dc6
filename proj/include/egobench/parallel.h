// Copyright 2026 The egobench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EGOBENCH_PARALLEL_H_
#define EGOBENCH_PARALLEL_H_

#include <cstddef>
#include <functional>
#include <optional>

namespace egobench {

// Worker count: the explicit request if positive, else EGOBENCH_THREADS if set
// to a positive integer, else the hardware concurrency (at least 1).
int ResolveThreads(std::optional<int> requested = std::nullopt);

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Callers write
// results into preallocated slot i, so output never depends on scheduling.
// The first exception thrown by any fn is rethrown after all workers stop.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace egobench

#endif  // EGOBENCH_PARALLEL_H_
