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

#ifndef EGOBENCH_SELFTEST_GRADCHECK_H_
#define EGOBENCH_SELFTEST_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace egobench::selftest {

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-4;
  // Denominator floor for the relative error.
  double floor = 1e-6;
  int min_probes = 100;
  int probes_per_instance = 10;
  // Give up after this many rejected probes per accepted one.
  int max_rejects_per_probe = 20;
};

// Scalar objective L(x) over a flat input, with its analytic gradient. For
// piecewise-smooth ops, `piece` identifies the smooth piece containing x; a
// probe whose +-step points leave the piece is rejected and redrawn.
struct GradProblem {
  std::vector<double> x;
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::function<std::vector<int>(std::span<const double>)> piece;
  // Coordinates eligible for probing; empty means all.
  std::vector<std::size_t> probe_coords;
};

using ProblemFactory = std::function<GradProblem(std::mt19937_64&)>;

struct GradCheckResult {
  std::string op;
  int probes = 0;
  int rejected = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

// Central differences (L(x + h e_k) - L(x - h e_k)) / 2h against the analytic
// gradient on random coordinates of fresh random instances until
// min_probes probes are accepted.
GradCheckResult CheckGradient(const std::string& op, const ProblemFactory& make,
                              std::uint64_t seed,
                              const GradCheckOptions& options = {});

double RelativeError(double analytic, double numeric, double floor);

}  // namespace egobench::selftest

#endif  // EGOBENCH_SELFTEST_GRADCHECK_H_
