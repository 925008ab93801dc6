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

#include "egobench/selftest/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace egobench::selftest {

double RelativeError(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult CheckGradient(const std::string& op, const ProblemFactory& make,
                              std::uint64_t seed,
                              const GradCheckOptions& options) {
  std::mt19937_64 rng(seed);
  GradCheckResult r;
  r.op = op;
  r.passed = true;
  const int reject_budget = options.min_probes * options.max_rejects_per_probe;

  while (r.probes < options.min_probes) {
    GradProblem p = make(rng);
    const std::vector<double> grad = p.gradient(p.x);
    const std::vector<int> base_piece = p.piece ? p.piece(p.x) : std::vector<int>{};
    std::vector<std::size_t> coords = p.probe_coords;
    if (coords.empty()) {
      coords.resize(p.x.size());
      for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;
    }

    int accepted = 0;
    int attempts = 0;
    while (accepted < options.probes_per_instance && r.probes < options.min_probes &&
           attempts < 4 * options.probes_per_instance) {
      ++attempts;
      const std::size_t k = coords[rng() % coords.size()];
      std::vector<double> plus = p.x;
      std::vector<double> minus = p.x;
      plus[k] += options.step;
      minus[k] -= options.step;
      if (p.piece && (p.piece(plus) != base_piece || p.piece(minus) != base_piece)) {
        if (++r.rejected > reject_budget) {
          r.passed = false;
          return r;
        }
        continue;
      }
      const double numeric = (p.value(plus) - p.value(minus)) / (2.0 * options.step);
      const double err = RelativeError(grad[k], numeric, options.floor);
      r.max_rel_error = std::max(r.max_rel_error, err);
      if (!(err <= options.tolerance)) r.passed = false;
      ++accepted;
      ++r.probes;
    }
  }
  return r;
}

}  // namespace egobench::selftest
