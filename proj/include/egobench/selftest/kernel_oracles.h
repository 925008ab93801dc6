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

#ifndef EGOBENCH_SELFTEST_KERNEL_ORACLES_H_
#define EGOBENCH_SELFTEST_KERNEL_ORACLES_H_

#include <array>
#include <span>
#include <vector>

#include "egobench/kernels.h"

// Slow, direct re-implementations used to cross-check the kernels.

namespace egobench::selftest {

// Nested-loop convolution stack with explicit bounds checks instead of
// padding.
Tensor3 NaiveScoreStack(const Tensor3& f_mod, const ScoreStack& stack);

// out[o] = bias[o] + sum_i w[o][i] * in[i].
std::vector<double> NaiveDense(std::span<const double> in, const DenseLayer& layer);

// Refinement from NaiveDense layers on a BilinearSample feature.
BoxPrediction NaiveRefineBox(const Tensor3& f, double c_y, double c_x,
                             const RefineMlp& mlp);

// ROIAlign as an average of BilinearSample calls at every sub-grid point.
Tensor3 BruteForceRoiAlign(const Tensor3& f, const Box& box, int out_size,
                           int sampling_ratio = 2);

// Element-wise mean with a separate accumulation per reference count.
TargetDescriptor MeanDescriptor(std::span<const ReferenceFeatures> refs);

double MaxAbsDiff(const Tensor3& a, const Tensor3& b);

}  // namespace egobench::selftest

#endif  // EGOBENCH_SELFTEST_KERNEL_ORACLES_H_
