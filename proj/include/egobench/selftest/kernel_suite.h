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

#ifndef EGOBENCH_SELFTEST_KERNEL_SUITE_H_
#define EGOBENCH_SELFTEST_KERNEL_SUITE_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "egobench/selftest/gradcheck.h"

namespace egobench::selftest {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random instance factories for every differentiable kernel op, by name:
// modulate, score_stack, softmax_center, bilinear_sample, refine_box,
// cls_confidence, detection_loss.
std::vector<std::pair<std::string, ProblemFactory>> GradientProblems();

std::vector<CheckOutcome> RunGradientSuite(std::uint64_t seed,
                                           const GradCheckOptions& options = {});

// Oracle and closed-form checks: score stack and refinement against naive
// loops, ROIAlign against brute-force sampling, softmax center identities,
// registration means.
std::vector<CheckOutcome> RunOracleSuite(std::uint64_t seed);

// Both suites; prints one line per check and returns true if all pass.
bool RunKernelSelfTest(std::uint64_t seed, std::ostream& out);

}  // namespace egobench::selftest

#endif  // EGOBENCH_SELFTEST_KERNEL_SUITE_H_
