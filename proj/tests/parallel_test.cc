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

#include "egobench/parallel.h"

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace egobench {
namespace {

TEST(ResolveThreadsTest, Precedence) {
  ::unsetenv("EGOBENCH_THREADS");
  EXPECT_EQ(ResolveThreads(3), 3);
  EXPECT_GE(ResolveThreads(), 1);
  ::setenv("EGOBENCH_THREADS", "5", 1);
  EXPECT_EQ(ResolveThreads(), 5);
  EXPECT_EQ(ResolveThreads(2), 2);
  ::setenv("EGOBENCH_THREADS", "junk", 1);
  EXPECT_GE(ResolveThreads(), 1);
  ::unsetenv("EGOBENCH_THREADS");
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<int> hits(1000, 0);
    ParallelFor(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  ParallelFor(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelForTest, RethrowsWorkerException) {
  EXPECT_THROW(ParallelFor(100, 4,
                           [](std::size_t i) {
                             if (i == 57) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

}  // namespace
}  // namespace egobench
