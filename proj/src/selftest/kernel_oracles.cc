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

#include "egobench/selftest/kernel_oracles.h"

#include <algorithm>
#include <cmath>

namespace egobench::selftest {

Tensor3 NaiveScoreStack(const Tensor3& f_mod, const ScoreStack& stack) {
  Tensor3 cur = f_mod;
  const int h = f_mod.height();
  const int w = f_mod.width();
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const ConvLayer& layer = stack.layers[l];
    Tensor3 next(layer.out_channels, h, w);
    for (int o = 0; o < layer.out_channels; ++o) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = layer.bias[o];
          for (int i = 0; i < layer.in_channels; ++i) {
            for (int ky = 0; ky < 3; ++ky) {
              for (int kx = 0; kx < 3; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                acc += layer.W(o, i, ky, kx) * cur.at(i, sy, sx);
              }
            }
          }
          const bool last = l + 1 == stack.layers.size();
          next.at(o, y, x) = last ? acc : std::max(acc, 0.0);
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> NaiveDense(std::span<const double> in, const DenseLayer& layer) {
  std::vector<double> out(layer.out_features);
  for (int o = 0; o < layer.out_features; ++o) {
    double acc = layer.bias[o];
    for (int i = 0; i < layer.in_features; ++i) {
      acc += layer.weights[static_cast<std::size_t>(o) * layer.in_features + i] *
             in[i];
    }
    out[o] = acc;
  }
  return out;
}

BoxPrediction NaiveRefineBox(const Tensor3& f, double c_y, double c_x,
                             const RefineMlp& mlp) {
  auto relu = [](std::vector<double> v) {
    for (double& x : v) x = std::max(x, 0.0);
    return v;
  };
  const std::vector<double> feat = BilinearSample(f, c_y, c_x);
  const auto h1 = relu(NaiveDense(feat, mlp.hidden1));
  const auto h2 = relu(NaiveDense(h1, mlp.hidden2));
  const auto out = NaiveDense(h2, mlp.output);
  BoxPrediction b;
  b.delta_cy = out[0];
  b.delta_cx = out[1];
  b.s_y = std::max(out[2], 0.0);
  b.s_x = std::max(out[3], 0.0);
  b.center_y = c_y + out[0];
  b.center_x = c_x + out[1];
  return b;
}

Tensor3 BruteForceRoiAlign(const Tensor3& f, const Box& box, int out_size,
                           int sampling_ratio) {
  const double h = f.height();
  const double w = f.width();
  Tensor3 out(f.channels(), out_size, out_size);
  const int n = sampling_ratio;
  for (int by = 0; by < out_size; ++by) {
    for (int bx = 0; bx < out_size; ++bx) {
      std::vector<double> sum(f.channels(), 0.0);
      for (int sy = 0; sy < n; ++sy) {
        for (int sx = 0; sx < n; ++sx) {
          // Sub-grid point in box coordinates, then in value coordinates.
          const double py = box.y + box.h * (by * n + sy + 0.5) / (out_size * n);
          const double px = box.x + box.w * (bx * n + sx + 0.5) / (out_size * n);
          const double y = py - 0.5;
          const double x = px - 0.5;
          if (y < -1.0 || y > h || x < -1.0 || x > w) continue;
          const auto v = BilinearSample(f, std::clamp(y, 0.0, h - 1),
                                        std::clamp(x, 0.0, w - 1));
          for (int c = 0; c < f.channels(); ++c) sum[c] += v[c];
        }
      }
      for (int c = 0; c < f.channels(); ++c) {
        out.at(c, by, bx) = sum[c] / (n * n);
      }
    }
  }
  return out;
}

TargetDescriptor MeanDescriptor(std::span<const ReferenceFeatures> refs) {
  const ReferenceFeatures& first = refs.front();
  TargetDescriptor t;
  t.t_loc.resize(first.f_loc.size());
  t.t_cls = Tensor3(first.f_cls.channels(), first.f_cls.height(),
                    first.f_cls.width());
  for (std::size_t k = 0; k < t.t_loc.size(); ++k) {
    double s = 0.0;
    for (const auto& r : refs) s += r.f_loc[k];
    t.t_loc[k] = s / refs.size();
  }
  for (int c = 0; c < t.t_cls.channels(); ++c) {
    for (int y = 0; y < t.t_cls.height(); ++y) {
      for (int x = 0; x < t.t_cls.width(); ++x) {
        double s = 0.0;
        for (const auto& r : refs) s += r.f_cls.at(c, y, x);
        t.t_cls.at(c, y, x) = s / refs.size();
      }
    }
  }
  return t;
}

double MaxAbsDiff(const Tensor3& a, const Tensor3& b) {
  if (!a.SameShape(b)) return INFINITY;
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

}  // namespace egobench::selftest
