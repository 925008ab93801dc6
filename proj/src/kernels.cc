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

#include "egobench/kernels.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "egobench/error.h"

namespace egobench {

namespace {

[[noreturn]] void ShapeFail(const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, what);
}

double Relu(double v) { return v > 0.0 ? v : 0.0; }

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// One 3x3 same-padding convolution. No activation.
Tensor3 Conv3x3(const Tensor3& in, const ConvLayer& layer) {
  const int h = in.height();
  const int w = in.width();
  Tensor3 out(layer.out_channels, h, w);
  for (int o = 0; o < layer.out_channels; ++o) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(o, y, x) = layer.bias[o];
    }
    for (int i = 0; i < layer.in_channels; ++i) {
      for (int ky = 0; ky < 3; ++ky) {
        const int y_lo = std::max(0, 1 - ky);
        const int y_hi = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double wgt = layer.W(o, i, ky, kx);
          if (wgt == 0.0) continue;
          const int x_lo = std::max(0, 1 - kx);
          const int x_hi = std::min(w, w + 1 - kx);
          for (int y = y_lo; y < y_hi; ++y) {
            for (int x = x_lo; x < x_hi; ++x) {
              out.at(o, y, x) += wgt * in.at(i, y + ky - 1, x + kx - 1);
            }
          }
        }
      }
    }
  }
  return out;
}

// Adjoint of Conv3x3 with respect to its input.
Tensor3 Conv3x3InputGrad(const Tensor3& d_out, const ConvLayer& layer) {
  const int h = d_out.height();
  const int w = d_out.width();
  Tensor3 d_in(layer.in_channels, h, w);
  for (int o = 0; o < layer.out_channels; ++o) {
    for (int i = 0; i < layer.in_channels; ++i) {
      for (int ky = 0; ky < 3; ++ky) {
        const int y_lo = std::max(0, 1 - ky);
        const int y_hi = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double wgt = layer.W(o, i, ky, kx);
          if (wgt == 0.0) continue;
          const int x_lo = std::max(0, 1 - kx);
          const int x_hi = std::min(w, w + 1 - kx);
          for (int y = y_lo; y < y_hi; ++y) {
            for (int x = x_lo; x < x_hi; ++x) {
              d_in.at(i, y + ky - 1, x + kx - 1) += wgt * d_out.at(o, y, x);
            }
          }
        }
      }
    }
  }
  return d_in;
}

void CheckStack(const Tensor3& in, const ScoreStack& stack) {
  if (stack.layers.empty()) ShapeFail("score stack has no layers");
  int channels = in.channels();
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const auto& layer = stack.layers[l];
    if (layer.in_channels != channels) {
      ShapeFail("score layer " + std::to_string(l) + " expects " +
                std::to_string(layer.in_channels) + " channels, got " +
                std::to_string(channels));
    }
    if (layer.weights.size() !=
            static_cast<std::size_t>(layer.out_channels) * layer.in_channels *
                9 ||
        layer.bias.size() != static_cast<std::size_t>(layer.out_channels)) {
      ShapeFail("score layer " + std::to_string(l) + " has wrong weight size");
    }
    channels = layer.out_channels;
  }
  if (channels != 1) ShapeFail("score stack must end with one channel");
}

// Pre-activations of every layer; the last entry is the score map.
std::vector<Tensor3> ScoreTrace(const Tensor3& f_mod, const ScoreStack& stack) {
  CheckStack(f_mod, stack);
  std::vector<Tensor3> pre;
  pre.reserve(stack.layers.size());
  Tensor3 act = f_mod;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    pre.push_back(Conv3x3(act, stack.layers[l]));
    if (l + 1 < stack.layers.size()) {
      act = pre.back();
      for (double& v : act.data()) v = Relu(v);
    }
  }
  return pre;
}

struct Cell {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
};

// Interpolation cell for coordinate t in [0, n-1].
Cell CellOf(double t, int n) {
  if (n == 1) return {0, 0, 0.0};
  int lo = static_cast<int>(std::floor(t));
  lo = std::clamp(lo, 0, n - 2);
  return {lo, lo + 1, t - lo};
}

void CheckSampleRange(const Tensor3& f, double y, double x) {
  if (!(y >= 0.0 && y <= f.height() - 1) || !(x >= 0.0 && x <= f.width() - 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample coordinate (" + std::to_string(y) + ", " +
                    std::to_string(x) + ") outside the feature map");
  }
}

void CheckDense(const DenseLayer& layer, std::size_t in, const char* name) {
  if (static_cast<std::size_t>(layer.in_features) != in ||
      layer.weights.size() !=
          static_cast<std::size_t>(layer.in_features) * layer.out_features ||
      layer.bias.size() != static_cast<std::size_t>(layer.out_features)) {
    ShapeFail(std::string("refine MLP layer ") + name + " has wrong shape");
  }
}

std::vector<double> DenseForward(std::span<const double> in,
                                 const DenseLayer& layer) {
  std::vector<double> out(layer.bias);
  for (int o = 0; o < layer.out_features; ++o) {
    const double* row =
        layer.weights.data() + static_cast<std::size_t>(o) * layer.in_features;
    double acc = 0.0;
    for (int i = 0; i < layer.in_features; ++i) acc += row[i] * in[i];
    out[o] += acc;
  }
  return out;
}

std::vector<double> DenseInputGrad(std::span<const double> d_out,
                                   const DenseLayer& layer) {
  std::vector<double> d_in(layer.in_features, 0.0);
  for (int o = 0; o < layer.out_features; ++o) {
    const double* row =
        layer.weights.data() + static_cast<std::size_t>(o) * layer.in_features;
    for (int i = 0; i < layer.in_features; ++i) d_in[i] += row[i] * d_out[o];
  }
  return d_in;
}

struct MlpTrace {
  std::vector<double> pre1;
  std::vector<double> pre2;
  std::vector<double> out;
};

MlpTrace MlpForward(std::span<const double> v, const RefineMlp& mlp) {
  CheckDense(mlp.hidden1, v.size(), "1");
  CheckDense(mlp.hidden2, mlp.hidden1.out_features, "2");
  CheckDense(mlp.output, mlp.hidden2.out_features, "3");
  if (mlp.output.out_features != 4) ShapeFail("refine MLP must output 4 values");
  MlpTrace t;
  t.pre1 = DenseForward(v, mlp.hidden1);
  std::vector<double> h1(t.pre1.size());
  std::transform(t.pre1.begin(), t.pre1.end(), h1.begin(), Relu);
  t.pre2 = DenseForward(h1, mlp.hidden2);
  std::vector<double> h2(t.pre2.size());
  std::transform(t.pre2.begin(), t.pre2.end(), h2.begin(), Relu);
  t.out = DenseForward(h2, mlp.output);
  return t;
}

}  // namespace

Tensor3 Modulate(const Tensor3& f, std::span<const double> t_loc) {
  if (t_loc.size() != static_cast<std::size_t>(f.channels())) {
    ShapeFail("t_loc has " + std::to_string(t_loc.size()) +
              " entries for a " + std::to_string(f.channels()) +
              "-channel feature map");
  }
  Tensor3 out(f.channels(), f.height(), f.width());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      double s = 0.0;
      for (int c = 0; c < f.channels(); ++c) s += t_loc[c] * f.at(c, y, x);
      for (int c = 0; c < f.channels(); ++c) out.at(c, y, x) = s * f.at(c, y, x);
    }
  }
  return out;
}

ModulateGrad ModulateBackward(const Tensor3& f, std::span<const double> t_loc,
                              const Tensor3& d_out) {
  if (t_loc.size() != static_cast<std::size_t>(f.channels()) ||
      !d_out.SameShape(f)) {
    ShapeFail("modulate backward shape mismatch");
  }
  ModulateGrad g{Tensor3(f.channels(), f.height(), f.width()),
                 std::vector<double>(t_loc.size(), 0.0)};
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      double s = 0.0;
      double gf = 0.0;  // sum_c d_out[c] * f[c]
      for (int c = 0; c < f.channels(); ++c) {
        s += t_loc[c] * f.at(c, y, x);
        gf += d_out.at(c, y, x) * f.at(c, y, x);
      }
      for (int c = 0; c < f.channels(); ++c) {
        g.d_f.at(c, y, x) = d_out.at(c, y, x) * s + t_loc[c] * gf;
        g.d_t_loc[c] += f.at(c, y, x) * gf;
      }
    }
  }
  return g;
}

ConvLayer ConvLayer::Zeros(int in_channels, int out_channels) {
  ConvLayer l;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.weights.assign(static_cast<std::size_t>(in_channels) * out_channels * 9,
                   0.0);
  l.bias.assign(out_channels, 0.0);
  return l;
}

ScoreStack ScoreStack::Zeros(std::span<const int> schedule) {
  if (schedule.size() < 2) ShapeFail("schedule needs at least two entries");
  ScoreStack s;
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    s.layers.push_back(ConvLayer::Zeros(schedule[i], schedule[i + 1]));
  }
  return s;
}

std::vector<int> ScoreStack::Schedule() const {
  std::vector<int> out;
  if (layers.empty()) return out;
  out.push_back(layers.front().in_channels);
  for (const auto& l : layers) out.push_back(l.out_channels);
  return out;
}

Tensor3 ScoreForward(const Tensor3& f_mod, const ScoreStack& stack) {
  return ScoreTrace(f_mod, stack).back();
}

Tensor3 ScoreBackward(const Tensor3& f_mod, const ScoreStack& stack,
                      const Tensor3& d_score) {
  std::vector<Tensor3> pre = ScoreTrace(f_mod, stack);
  if (!d_score.SameShape(pre.back())) ShapeFail("score gradient shape");
  Tensor3 d = d_score;
  for (std::size_t l = stack.layers.size(); l-- > 0;) {
    d = Conv3x3InputGrad(d, stack.layers[l]);
    if (l > 0) {
      auto mask = pre[l - 1].data();
      auto dd = d.data();
      for (std::size_t k = 0; k < dd.size(); ++k) {
        if (!(mask[k] > 0.0)) dd[k] = 0.0;
      }
    }
  }
  return d;
}

std::vector<int> ScoreActivationPattern(const Tensor3& f_mod,
                                        const ScoreStack& stack) {
  std::vector<Tensor3> pre = ScoreTrace(f_mod, stack);
  std::vector<int> pattern;
  for (std::size_t l = 0; l + 1 < pre.size(); ++l) {
    for (double v : pre[l].data()) pattern.push_back(v > 0.0 ? 1 : 0);
  }
  return pattern;
}

CenterPrediction SoftmaxCenter(const Tensor3& score_map) {
  if (score_map.channels() != 1) ShapeFail("score map must have one channel");
  if (!score_map.AllFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "score map has non-finite entries");
  }
  CenterPrediction out;
  out.height = score_map.height();
  out.width = score_map.width();
  auto z = score_map.data();
  const double m = *std::max_element(z.begin(), z.end());
  out.p.resize(z.size());
  double total = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    out.p[k] = std::exp(z[k] - m);
    total += out.p[k];
  }
  for (double& v : out.p) v /= total;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double pk = out.p[static_cast<std::size_t>(y) * out.width + x];
      out.c_y += pk * y;
      out.c_x += pk * x;
    }
  }
  return out;
}

Tensor3 SoftmaxCenterBackward(const CenterPrediction& forward, double d_cy,
                              double d_cx, std::span<const double> d_p) {
  if (!d_p.empty() && d_p.size() != forward.p.size()) {
    ShapeFail("softmax probability gradient has wrong length");
  }
  Tensor3 d(1, forward.height, forward.width);
  auto dz = d.data();
  std::vector<double> u(forward.p.size());
  double mean = 0.0;
  for (int y = 0; y < forward.height; ++y) {
    for (int x = 0; x < forward.width; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * forward.width + x;
      u[k] = d_cy * y + d_cx * x + (d_p.empty() ? 0.0 : d_p[k]);
      mean += forward.p[k] * u[k];
    }
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    dz[k] = forward.p[k] * (u[k] - mean);
  }
  return d;
}

std::vector<double> BilinearSample(const Tensor3& f, double y, double x) {
  CheckSampleRange(f, y, x);
  const Cell cy = CellOf(y, f.height());
  const Cell cx = CellOf(x, f.width());
  std::vector<double> out(f.channels());
  for (int c = 0; c < f.channels(); ++c) {
    const double top = (1.0 - cx.frac) * f.at(c, cy.lo, cx.lo) +
                       cx.frac * f.at(c, cy.lo, cx.hi);
    const double bottom = (1.0 - cx.frac) * f.at(c, cy.hi, cx.lo) +
                          cx.frac * f.at(c, cy.hi, cx.hi);
    out[c] = (1.0 - cy.frac) * top + cy.frac * bottom;
  }
  return out;
}

SampleGrad BilinearSampleBackward(const Tensor3& f, double y, double x,
                                  std::span<const double> d_out) {
  CheckSampleRange(f, y, x);
  if (d_out.size() != static_cast<std::size_t>(f.channels())) {
    ShapeFail("bilinear gradient has wrong length");
  }
  const Cell cy = CellOf(y, f.height());
  const Cell cx = CellOf(x, f.width());
  SampleGrad g{Tensor3(f.channels(), f.height(), f.width()), 0.0, 0.0};
  const bool vary_y = f.height() > 1;
  const bool vary_x = f.width() > 1;
  for (int c = 0; c < f.channels(); ++c) {
    const double v00 = f.at(c, cy.lo, cx.lo);
    const double v01 = f.at(c, cy.lo, cx.hi);
    const double v10 = f.at(c, cy.hi, cx.lo);
    const double v11 = f.at(c, cy.hi, cx.hi);
    const double gc = d_out[c];
    g.d_f.at(c, cy.lo, cx.lo) += gc * (1.0 - cy.frac) * (1.0 - cx.frac);
    g.d_f.at(c, cy.lo, cx.hi) += gc * (1.0 - cy.frac) * cx.frac;
    g.d_f.at(c, cy.hi, cx.lo) += gc * cy.frac * (1.0 - cx.frac);
    g.d_f.at(c, cy.hi, cx.hi) += gc * cy.frac * cx.frac;
    if (vary_y) {
      g.d_y += gc * ((1.0 - cx.frac) * (v10 - v00) + cx.frac * (v11 - v01));
    }
    if (vary_x) {
      g.d_x += gc * ((1.0 - cy.frac) * (v01 - v00) + cy.frac * (v11 - v10));
    }
  }
  return g;
}

DenseLayer DenseLayer::Zeros(int in_features, int out_features) {
  DenseLayer l;
  l.in_features = in_features;
  l.out_features = out_features;
  l.weights.assign(static_cast<std::size_t>(in_features) * out_features, 0.0);
  l.bias.assign(out_features, 0.0);
  return l;
}

RefineMlp RefineMlp::Zeros(int channels, int hidden) {
  return {DenseLayer::Zeros(channels, hidden), DenseLayer::Zeros(hidden, hidden),
          DenseLayer::Zeros(hidden, 4)};
}

std::array<double, 4> RefineMlpRaw(std::span<const double> feature,
                                   const RefineMlp& mlp) {
  const MlpTrace t = MlpForward(feature, mlp);
  return {t.out[0], t.out[1], t.out[2], t.out[3]};
}

BoxPrediction RefineBox(const Tensor3& f, double c_y, double c_x,
                        const RefineMlp& mlp) {
  const std::vector<double> v = BilinearSample(f, c_y, c_x);
  const auto raw = RefineMlpRaw(v, mlp);
  BoxPrediction b;
  b.delta_cy = raw[0];
  b.delta_cx = raw[1];
  b.s_y = Relu(raw[2]);
  b.s_x = Relu(raw[3]);
  b.center_y = c_y + b.delta_cy;
  b.center_x = c_x + b.delta_cx;
  return b;
}

BoxPrediction RefineBox(const Tensor3& f, const CenterPrediction& center,
                        const RefineMlp& mlp) {
  return RefineBox(f, center.c_y, center.c_x, mlp);
}

RefineGrad RefineBoxBackward(const Tensor3& f, double c_y, double c_x,
                             const RefineMlp& mlp,
                             const BoxPredictionGrad& up) {
  const std::vector<double> v = BilinearSample(f, c_y, c_x);
  const MlpTrace t = MlpForward(v, mlp);

  std::vector<double> d_out{up.d_delta_cy + up.d_center_y,
                            up.d_delta_cx + up.d_center_x,
                            t.out[2] > 0.0 ? up.d_s_y : 0.0,
                            t.out[3] > 0.0 ? up.d_s_x : 0.0};
  std::vector<double> d_h2 = DenseInputGrad(d_out, mlp.output);
  for (std::size_t k = 0; k < d_h2.size(); ++k) {
    if (!(t.pre2[k] > 0.0)) d_h2[k] = 0.0;
  }
  std::vector<double> d_h1 = DenseInputGrad(d_h2, mlp.hidden2);
  for (std::size_t k = 0; k < d_h1.size(); ++k) {
    if (!(t.pre1[k] > 0.0)) d_h1[k] = 0.0;
  }
  const std::vector<double> d_v = DenseInputGrad(d_h1, mlp.hidden1);

  SampleGrad sg = BilinearSampleBackward(f, c_y, c_x, d_v);
  return {std::move(sg.d_f), sg.d_y + up.d_center_y, sg.d_x + up.d_center_x};
}

std::vector<int> RefineActivationPattern(const Tensor3& f, double c_y,
                                         double c_x, const RefineMlp& mlp) {
  const std::vector<double> v = BilinearSample(f, c_y, c_x);
  const MlpTrace t = MlpForward(v, mlp);
  std::vector<int> pattern;
  for (double p : t.pre1) pattern.push_back(p > 0.0);
  for (double p : t.pre2) pattern.push_back(p > 0.0);
  pattern.push_back(t.out[2] > 0.0);
  pattern.push_back(t.out[3] > 0.0);
  pattern.push_back(CellOf(c_y, f.height()).lo);
  pattern.push_back(CellOf(c_x, f.width()).lo);
  return pattern;
}

Tensor3 RoiAlign(const Tensor3& f, const Box& box, int out_size,
                 int sampling_ratio) {
  if (out_size <= 0 || sampling_ratio <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "ROIAlign output size and sampling ratio must be positive");
  }
  if (box.IsDegenerate()) {
    throw Error(ErrorCode::kInvalidArgument, "ROIAlign box is degenerate");
  }
  const int h = f.height();
  const int w = f.width();
  if (box.x >= w || box.Right() <= 0.0 || box.y >= h || box.Bottom() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "ROIAlign box does not intersect the feature map");
  }
  const double bin_h = box.h / out_size;
  const double bin_w = box.w / out_size;
  const int count = sampling_ratio * sampling_ratio;

  Tensor3 out(f.channels(), out_size, out_size);
  // Running mean over in-bounds samples keeps constant inputs exact.
  std::vector<double> mean(f.channels());
  for (int py = 0; py < out_size; ++py) {
    for (int px = 0; px < out_size; ++px) {
      std::fill(mean.begin(), mean.end(), 0.0);
      int valid = 0;
      for (int iy = 0; iy < sampling_ratio; ++iy) {
        // Shift by half a cell: values live at cell centers.
        double yy = box.y + py * bin_h + (iy + 0.5) * bin_h / sampling_ratio -
                    0.5;
        if (yy < -1.0 || yy > h) continue;
        yy = std::clamp(yy, 0.0, static_cast<double>(h - 1));
        const int y0 = h == 1 ? 0 : std::min(static_cast<int>(yy), h - 2);
        const int y1 = h == 1 ? 0 : y0 + 1;
        const double ly = h == 1 ? 0.0 : yy - y0;
        for (int ix = 0; ix < sampling_ratio; ++ix) {
          double xx = box.x + px * bin_w +
                      (ix + 0.5) * bin_w / sampling_ratio - 0.5;
          if (xx < -1.0 || xx > w) continue;
          xx = std::clamp(xx, 0.0, static_cast<double>(w - 1));
          const int x0 = w == 1 ? 0 : std::min(static_cast<int>(xx), w - 2);
          const int x1 = w == 1 ? 0 : x0 + 1;
          const double lx = w == 1 ? 0.0 : xx - x0;
          ++valid;
          for (int c = 0; c < f.channels(); ++c) {
            const double top =
                f.at(c, y0, x0) + lx * (f.at(c, y0, x1) - f.at(c, y0, x0));
            const double bottom =
                f.at(c, y1, x0) + lx * (f.at(c, y1, x1) - f.at(c, y1, x0));
            mean[c] += (top + ly * (bottom - top) - mean[c]) / valid;
          }
        }
      }
      // Out-of-bounds samples count as zeros.
      const double scale = static_cast<double>(valid) / count;
      for (int c = 0; c < f.channels(); ++c) {
        out.at(c, py, px) = mean[c] * scale;
      }
    }
  }
  return out;
}

Box PredictedGridBox(const BoxPrediction& pred) {
  return Box{pred.center_x + 0.5 - 0.5 * pred.s_x,
             pred.center_y + 0.5 - 0.5 * pred.s_y, pred.s_x, pred.s_y};
}

double ClsConfidence(const Tensor3& roi_feat, const Tensor3& t_cls) {
  if (!roi_feat.SameShape(t_cls)) {
    ShapeFail("ROI feature and T_cls shapes differ");
  }
  double dot = 0.0;
  auto a = roi_feat.data();
  auto b = t_cls.data();
  for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
  return Sigmoid(dot);
}

ClsGrad ClsConfidenceBackward(const Tensor3& roi_feat, const Tensor3& t_cls,
                              double d_confidence) {
  const double s = ClsConfidence(roi_feat, t_cls);
  const double scale = d_confidence * s * (1.0 - s);
  ClsGrad g{t_cls, roi_feat};
  for (double& v : g.d_roi_feat.data()) v *= scale;
  for (double& v : g.d_t_cls.data()) v *= scale;
  return g;
}

TargetDescriptor RegisterTarget(std::span<const ReferenceFeatures> refs) {
  if (refs.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "target registration needs at least one reference");
  }
  const auto& first = refs.front();
  if (first.f_cls.channels() != static_cast<int>(first.f_loc.size())) {
    ShapeFail("reference T_loc and T_cls channel counts differ");
  }
  if (first.f_cls.height() != first.f_cls.width() ||
      first.f_cls.height() % 2 == 0) {
    ShapeFail("T_cls must be S x S with S odd");
  }
  TargetDescriptor t{std::vector<double>(first.f_loc.size(), 0.0),
                     Tensor3(first.f_cls.channels(), first.f_cls.height(),
                             first.f_cls.width())};
  for (const auto& r : refs) {
    if (r.f_loc.size() != first.f_loc.size() ||
        !r.f_cls.SameShape(first.f_cls)) {
      ShapeFail("reference features have inconsistent shapes");
    }
    for (std::size_t k = 0; k < r.f_loc.size(); ++k) t.t_loc[k] += r.f_loc[k];
    auto src = r.f_cls.data();
    auto dst = t.t_cls.data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
  }
  const double n = static_cast<double>(refs.size());
  for (double& v : t.t_loc) v /= n;
  for (double& v : t.t_cls.data()) v /= n;
  return t;
}

Detection DetectTarget(const Tensor3& f, const TargetDescriptor& target,
                       const TargetHead& head) {
  if (target.t_cls.channels() != f.channels()) {
    ShapeFail("T_cls channels differ from the feature map");
  }
  Detection d;
  const Tensor3 f_mod = Modulate(f, target.t_loc);
  d.center = SoftmaxCenter(ScoreForward(f_mod, head.score));
  d.box = RefineBox(f, d.center, head.refine);

  BoxPrediction pooled = d.box;
  pooled.s_y = std::max(pooled.s_y, 1.0);
  pooled.s_x = std::max(pooled.s_x, 1.0);
  pooled.center_y =
      std::clamp(pooled.center_y, 0.0, static_cast<double>(f.height() - 1));
  pooled.center_x =
      std::clamp(pooled.center_x, 0.0, static_cast<double>(f.width() - 1));
  d.grid_box = PredictedGridBox(pooled);
  d.box.confidence =
      ClsConfidence(RoiAlign(f, d.grid_box, target.resolution()), target.t_cls);
  return d;
}

}  // namespace egobench
