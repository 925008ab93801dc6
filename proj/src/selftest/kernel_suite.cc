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

#include "egobench/selftest/kernel_suite.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "egobench/error.h"
#include "egobench/kernels.h"
#include "egobench/losses.h"
#include "egobench/selftest/kernel_oracles.h"

namespace egobench::selftest {

namespace {

double Normal(std::mt19937_64& rng, double sd = 1.0) {
  return std::normal_distribution<double>(0.0, sd)(rng);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Tensor3 RandomTensor(std::mt19937_64& rng, int c, int h, int w, double sd = 1.0) {
  Tensor3 t(c, h, w);
  for (double& v : t.data()) v = Normal(rng, sd);
  return t;
}

std::vector<double> RandomVector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = Normal(rng, sd);
  return v;
}

Tensor3 TensorFrom(std::span<const double> x, int c, int h, int w) {
  Tensor3 t(c, h, w);
  std::copy(x.begin(), x.begin() + t.size(), t.data().begin());
  return t;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

ScoreStack RandomStack(std::mt19937_64& rng, std::span<const int> schedule) {
  ScoreStack s = ScoreStack::Zeros(schedule);
  for (ConvLayer& l : s.layers) {
    const double sd = std::sqrt(2.0 / (9.0 * l.in_channels));
    for (double& w : l.weights) w = Normal(rng, sd);
    for (double& b : l.bias) b = Normal(rng, 0.1);
  }
  return s;
}

RefineMlp RandomMlp(std::mt19937_64& rng, int channels, int hidden = 256) {
  RefineMlp m = RefineMlp::Zeros(channels, hidden);
  for (DenseLayer* l : {&m.hidden1, &m.hidden2, &m.output}) {
    const double sd = std::sqrt(2.0 / l->in_features);
    for (double& w : l->weights) w = Normal(rng, sd);
    for (double& b : l->bias) b = Normal(rng, 0.1);
  }
  return m;
}

GradProblem ModulateProblem(std::mt19937_64& rng) {
  constexpr int C = 4, H = 3, W = 3;
  const std::size_t n = static_cast<std::size_t>(C) * H * W;
  GradProblem p;
  p.x = RandomVector(rng, n + C);
  const auto g = RandomVector(rng, n);
  p.value = [=](std::span<const double> x) {
    const Tensor3 out = Modulate(TensorFrom(x, C, H, W), x.subspan(n));
    return Dot(out.data(), g);
  };
  p.gradient = [=](std::span<const double> x) {
    const ModulateGrad mg = ModulateBackward(TensorFrom(x, C, H, W), x.subspan(n),
                                             TensorFrom(g, C, H, W));
    std::vector<double> out(mg.d_f.data().begin(), mg.d_f.data().end());
    out.insert(out.end(), mg.d_t_loc.begin(), mg.d_t_loc.end());
    return out;
  };
  return p;
}

GradProblem ScoreStackProblem(std::mt19937_64& rng) {
  constexpr int H = 5, W = 5;
  const int C = kDefaultScoreSchedule.front();
  const auto stack = std::make_shared<ScoreStack>(RandomStack(rng, kDefaultScoreSchedule));
  GradProblem p;
  p.x = RandomVector(rng, static_cast<std::size_t>(C) * H * W);
  const Tensor3 g = RandomTensor(rng, 1, H, W);
  p.value = [=](std::span<const double> x) {
    return Dot(ScoreForward(TensorFrom(x, C, H, W), *stack).data(), g.data());
  };
  p.gradient = [=](std::span<const double> x) {
    const Tensor3 d = ScoreBackward(TensorFrom(x, C, H, W), *stack, g);
    return std::vector<double>(d.data().begin(), d.data().end());
  };
  p.piece = [=](std::span<const double> x) {
    return ScoreActivationPattern(TensorFrom(x, C, H, W), *stack);
  };
  return p;
}

GradProblem SoftmaxCenterProblem(std::mt19937_64& rng) {
  constexpr int H = 4, W = 5;
  GradProblem p;
  p.x = RandomVector(rng, H * W, 2.0);
  const double a = Normal(rng);
  const double b = Normal(rng);
  const auto gp = RandomVector(rng, H * W);
  p.value = [=](std::span<const double> x) {
    const CenterPrediction c = SoftmaxCenter(TensorFrom(x, 1, H, W));
    return a * c.c_y + b * c.c_x + Dot(c.p, gp);
  };
  p.gradient = [=](std::span<const double> x) {
    const CenterPrediction c = SoftmaxCenter(TensorFrom(x, 1, H, W));
    const Tensor3 d = SoftmaxCenterBackward(c, a, b, gp);
    return std::vector<double>(d.data().begin(), d.data().end());
  };
  return p;
}

// Interpolation cell of (y, x), or {-1} outside the sampling range.
std::vector<int> SampleCell(double y, double x, int h, int w) {
  if (!(y >= 0.0 && y <= h - 1) || !(x >= 0.0 && x <= w - 1)) return {-1};
  auto lo = [](double t, int n) {
    return n == 1 ? 0 : std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
  };
  return {lo(y, h), lo(x, w)};
}

GradProblem BilinearProblem(std::mt19937_64& rng) {
  constexpr int C = 3, H = 4, W = 5;
  const std::size_t n = static_cast<std::size_t>(C) * H * W;
  GradProblem p;
  p.x = RandomVector(rng, n);
  p.x.push_back(Uniform(rng, 0.0, H - 1));
  p.x.push_back(Uniform(rng, 0.0, W - 1));
  const auto g = RandomVector(rng, C);
  p.value = [=](std::span<const double> x) {
    return Dot(BilinearSample(TensorFrom(x, C, H, W), x[n], x[n + 1]), g);
  };
  p.gradient = [=](std::span<const double> x) {
    const SampleGrad sg = BilinearSampleBackward(TensorFrom(x, C, H, W), x[n],
                                                 x[n + 1], g);
    std::vector<double> out(sg.d_f.data().begin(), sg.d_f.data().end());
    out.push_back(sg.d_y);
    out.push_back(sg.d_x);
    return out;
  };
  p.piece = [=](std::span<const double> x) { return SampleCell(x[n], x[n + 1], H, W); };
  return p;
}

GradProblem RefineProblem(std::mt19937_64& rng) {
  constexpr int C = 6, H = 4, W = 4;
  const std::size_t n = static_cast<std::size_t>(C) * H * W;
  const auto mlp = std::make_shared<RefineMlp>(RandomMlp(rng, C));
  GradProblem p;
  p.x = RandomVector(rng, n);
  p.x.push_back(Uniform(rng, 0.0, H - 1));
  p.x.push_back(Uniform(rng, 0.0, W - 1));
  const auto g = RandomVector(rng, 6);
  p.value = [=](std::span<const double> x) {
    const BoxPrediction b = RefineBox(TensorFrom(x, C, H, W), x[n], x[n + 1], *mlp);
    return g[0] * b.delta_cy + g[1] * b.delta_cx + g[2] * b.s_y + g[3] * b.s_x +
           g[4] * b.center_y + g[5] * b.center_x;
  };
  p.gradient = [=](std::span<const double> x) {
    const BoxPredictionGrad up{g[0], g[1], g[2], g[3], g[4], g[5]};
    const RefineGrad rg =
        RefineBoxBackward(TensorFrom(x, C, H, W), x[n], x[n + 1], *mlp, up);
    std::vector<double> out(rg.d_f.data().begin(), rg.d_f.data().end());
    out.push_back(rg.d_c_y);
    out.push_back(rg.d_c_x);
    return out;
  };
  p.piece = [=](std::span<const double> x) {
    if (SampleCell(x[n], x[n + 1], H, W).size() == 1) return std::vector<int>{-1};
    return RefineActivationPattern(TensorFrom(x, C, H, W), x[n], x[n + 1], *mlp);
  };
  return p;
}

GradProblem ClsProblem(std::mt19937_64& rng) {
  constexpr int C = 4, S = kDefaultClsResolution;
  const std::size_t n = static_cast<std::size_t>(C) * S * S;
  GradProblem p;
  p.x = RandomVector(rng, 2 * n, 0.3);
  const double g = Normal(rng);
  p.value = [=](std::span<const double> x) {
    return g * ClsConfidence(TensorFrom(x, C, S, S), TensorFrom(x.subspan(n), C, S, S));
  };
  p.gradient = [=](std::span<const double> x) {
    const ClsGrad cg = ClsConfidenceBackward(TensorFrom(x, C, S, S),
                                             TensorFrom(x.subspan(n), C, S, S), g);
    std::vector<double> out(cg.d_roi_feat.data().begin(), cg.d_roi_feat.data().end());
    out.insert(out.end(), cg.d_t_cls.data().begin(), cg.d_t_cls.data().end());
    return out;
  };
  return p;
}

int Sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

LossInput LossInputFrom(std::span<const double> x) {
  return {x[0], x[1], x[2], x[3], x[4]};
}

GradProblem LossProblem(std::mt19937_64& rng) {
  LossConfig cfg;
  cfg.positive_weight = Uniform(rng, 0.5, 2.0);
  cfg.index_weight = Uniform(rng, 0.5, 2.0);
  cfg.negative_weight = Uniform(rng, 0.5, 2.0);
  cfg.l1_weight = Uniform(rng, 0.5, 2.0);
  cfg.giou_weight = Uniform(rng, 0.5, 2.0);
  const auto role = static_cast<ImageRole>(rng() % 3);
  std::optional<Box> gt;
  Box g{Uniform(rng, 0, 20), Uniform(rng, 0, 20), Uniform(rng, 2, 10),
        Uniform(rng, 2, 10)};
  if (role != ImageRole::kNegative) gt = g;

  GradProblem p;
  p.x = {g.CenterY() + Normal(rng, 2.0), g.CenterX() + Normal(rng, 2.0),
         g.h * Uniform(rng, 0.5, 1.5), g.w * Uniform(rng, 0.5, 1.5),
         Uniform(rng, 0.05, 0.95)};
  p.value = [=](std::span<const double> x) {
    return DetectionLoss(LossInputFrom(x), gt, cfg, role).total;
  };
  p.gradient = [=](std::span<const double> x) {
    const LossGrad lg = DetectionLossBackward(LossInputFrom(x), gt, cfg, role);
    return std::vector<double>{lg.d_center_y, lg.d_center_x, lg.d_size_y,
                               lg.d_size_x, lg.d_confidence};
  };
  p.piece = [=](std::span<const double> x) {
    const LossInput in = LossInputFrom(x);
    if (!gt) return std::vector<int>{};
    const Box b = in.AsBox();
    const double iw = std::min(b.Right(), gt->Right()) - std::max(b.x, gt->x);
    const double ih = std::min(b.Bottom(), gt->Bottom()) - std::max(b.y, gt->y);
    return std::vector<int>{
        static_cast<int>(AssignLabel(Iou(b, *gt), cfg)),
        Sign(in.center_y - gt->CenterY()), Sign(in.center_x - gt->CenterX()),
        Sign(in.size_y - gt->h), Sign(in.size_x - gt->w),
        Sign(b.x - gt->x), Sign(b.Right() - gt->Right()),
        Sign(b.y - gt->y), Sign(b.Bottom() - gt->Bottom()),
        Sign(iw), Sign(ih)};
  };
  return p;
}

CheckOutcome Outcome(std::string name, bool ok, const std::string& detail) {
  return {std::move(name), ok, detail};
}

std::string Sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

CheckOutcome CheckScoreOracle(std::mt19937_64& rng) {
  double worst = 0.0;
  const int small[] = {8, 6, 4, 1};
  for (int trial = 0; trial < 5; ++trial) {
    const ScoreStack s = RandomStack(rng, small);
    const Tensor3 f = RandomTensor(rng, 8, 6, 7);
    worst = std::max(worst, MaxAbsDiff(ScoreForward(f, s), NaiveScoreStack(f, s)));
  }
  const ScoreStack full = RandomStack(rng, kDefaultScoreSchedule);
  const Tensor3 f = RandomTensor(rng, kDefaultScoreSchedule.front(), 5, 5);
  worst = std::max(worst, MaxAbsDiff(ScoreForward(f, full), NaiveScoreStack(f, full)));
  const Tensor3 zero = ScoreForward(f, ScoreStack::Zeros(kDefaultScoreSchedule));
  const bool zeros_ok = MaxAbsDiff(zero, Tensor3(1, 5, 5)) == 0.0;
  return Outcome("score_stack_oracle", worst <= 1e-6 && zeros_ok,
                 "max |diff| " + Sci(worst));
}

CheckOutcome CheckRefineOracle(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const RefineMlp mlp = RandomMlp(rng, 6);
    const Tensor3 f = RandomTensor(rng, 6, 4, 5);
    const double cy = Uniform(rng, 0, 3);
    const double cx = Uniform(rng, 0, 4);
    const BoxPrediction a = RefineBox(f, cy, cx, mlp);
    const BoxPrediction b = NaiveRefineBox(f, cy, cx, mlp);
    for (double d : {a.delta_cy - b.delta_cy, a.delta_cx - b.delta_cx, a.s_y - b.s_y,
                     a.s_x - b.s_x, a.center_y - b.center_y, a.center_x - b.center_x}) {
      worst = std::max(worst, std::abs(d));
    }
  }
  RefineMlp bias_only = RefineMlp::Zeros(6);
  bias_only.output.bias = {0.5, -0.5, 3.0, -2.0};
  const BoxPrediction b = RefineBox(Tensor3(6, 3, 3, 1.0), 1.0, 1.0, bias_only);
  const bool bias_ok = b.delta_cy == 0.5 && b.delta_cx == -0.5 && b.s_y == 3.0 &&
                       b.s_x == 0.0;
  return Outcome("refine_box_oracle", worst <= 1e-6 && bias_ok,
                 "max |diff| " + Sci(worst));
}

CheckOutcome CheckRoiAlignOracle(std::mt19937_64& rng) {
  Tensor3 hand(1, 2, 2);
  hand.at(0, 0, 0) = 0;
  hand.at(0, 0, 1) = 1;
  hand.at(0, 1, 0) = 2;
  hand.at(0, 1, 1) = 3;
  Tensor3 expected(1, 2, 2);
  expected.at(0, 0, 0) = 0.375;
  expected.at(0, 0, 1) = 1.125;
  expected.at(0, 1, 0) = 1.875;
  expected.at(0, 1, 1) = 2.625;
  const Box full{0, 0, 2, 2};
  double worst = std::max(MaxAbsDiff(RoiAlign(hand, full, 2), expected),
                          MaxAbsDiff(RoiAlign(hand, full, 2),
                                     BruteForceRoiAlign(hand, full, 2)));
  const int sizes[] = {1, 2, 3, 5};
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 7);
    const int w = 1 + static_cast<int>(rng() % 7);
    const Tensor3 f = RandomTensor(rng, 2, h, w);
    const double bw = Uniform(rng, 0.25, w + 1.0);
    const double bh = Uniform(rng, 0.25, h + 1.0);
    const Box box{Uniform(rng, -bw + 0.1, w - 0.1), Uniform(rng, -bh + 0.1, h - 0.1),
                  bw, bh};
    const int s = sizes[rng() % 4];
    worst = std::max(worst, MaxAbsDiff(RoiAlign(f, box, s), BruteForceRoiAlign(f, box, s)));
  }
  return Outcome("roi_align_oracle", worst <= 1e-9, "max |diff| " + Sci(worst));
}

CheckOutcome CheckRoiAlignConstant(std::mt19937_64& rng) {
  bool exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 6);
    const int w = 1 + static_cast<int>(rng() % 6);
    const double v = Normal(rng, 10.0);
    const Tensor3 f(3, h, w, v);
    const double bw = Uniform(rng, 0.1, w);
    const double bh = Uniform(rng, 0.1, h);
    const Box box{Uniform(rng, 0, w - bw), Uniform(rng, 0, h - bh), bw, bh};
    const Tensor3 out = RoiAlign(f, box, 1 + static_cast<int>(rng() % 5));
    for (double x : out.data()) exact = exact && x == v;
  }
  return Outcome("roi_align_constant", exact, exact ? "exact" : "not exact");
}

CheckOutcome CheckSoftmaxClosedForms(std::mt19937_64& rng) {
  std::ostringstream detail;
  const CenterPrediction uni = SoftmaxCenter(Tensor3(1, 5, 5));
  const double e_uni = std::max(std::abs(uni.c_y - 2.0), std::abs(uni.c_x - 2.0));

  Tensor3 spike(1, 5, 5);
  spike.at(0, 1, 3) = 1000.0;
  const CenterPrediction one = SoftmaxCenter(spike);
  const double e_one = std::max(std::abs(one.c_y - 1.0), std::abs(one.c_x - 3.0));

  double e_shift = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor3 m = RandomTensor(rng, 1, 4, 6, 3.0);
    Tensor3 shifted = m;
    const double k = Normal(rng, 50.0);
    for (double& v : shifted.data()) v += k;
    const CenterPrediction a = SoftmaxCenter(m);
    const CenterPrediction b = SoftmaxCenter(shifted);
    e_shift = std::max({e_shift, std::abs(a.c_y - b.c_y), std::abs(a.c_x - b.c_x)});
    for (std::size_t i = 0; i < a.p.size(); ++i) {
      e_shift = std::max(e_shift, std::abs(a.p[i] - b.p[i]));
    }
  }

  Tensor3 small(1, 2, 2);
  small.at(0, 0, 1) = std::log(3.0);
  const CenterPrediction c = SoftmaxCenter(small);
  const double want[] = {1.0 / 6, 0.5, 1.0 / 6, 1.0 / 6};
  double e_small = std::max(std::abs(c.c_y - 1.0 / 3), std::abs(c.c_x - 2.0 / 3));
  for (int i = 0; i < 4; ++i) e_small = std::max(e_small, std::abs(c.p[i] - want[i]));

  detail << "uniform " << Sci(e_uni) << ", one-hot " << Sci(e_one) << ", shift "
         << Sci(e_shift) << ", 2x2 " << Sci(e_small);
  return Outcome("softmax_center_closed_forms",
                 e_uni <= 1e-9 && e_one <= 1e-6 && e_shift <= 1e-9 && e_small <= 1e-12,
                 detail.str());
}

CheckOutcome CheckRegisterTarget(std::mt19937_64& rng) {
  std::vector<ReferenceFeatures> refs;
  for (int i = 0; i < 3; ++i) {
    refs.push_back({RandomVector(rng, 8), RandomTensor(rng, 8, 5, 5)});
  }
  const TargetDescriptor a = RegisterTarget(refs);
  const TargetDescriptor b = MeanDescriptor(refs);
  double worst = MaxAbsDiff(a.t_cls, b.t_cls);
  for (std::size_t k = 0; k < a.t_loc.size(); ++k) {
    worst = std::max(worst, std::abs(a.t_loc[k] - b.t_loc[k]));
  }
  return Outcome("register_target_mean", worst <= 1e-9, "max |diff| " + Sci(worst));
}

CheckOutcome CheckClsConfidence() {
  Tensor3 a(1, 1, 1, std::log(3.0));
  Tensor3 b(1, 1, 1, 1.0);
  const double c = ClsConfidence(a, b);
  const double z = ClsConfidence(a, Tensor3(1, 1, 1, 0.0));
  const double e = std::max(std::abs(c - 0.75), std::abs(z - 0.5));
  return Outcome("cls_confidence_closed_forms", e <= 1e-12, "max |diff| " + Sci(e));
}

}  // namespace

std::vector<std::pair<std::string, ProblemFactory>> GradientProblems() {
  return {{"modulate", ModulateProblem},
          {"score_stack", ScoreStackProblem},
          {"softmax_center", SoftmaxCenterProblem},
          {"bilinear_sample", BilinearProblem},
          {"refine_box", RefineProblem},
          {"cls_confidence", ClsProblem},
          {"detection_loss", LossProblem}};
}

std::vector<CheckOutcome> RunGradientSuite(std::uint64_t seed,
                                           const GradCheckOptions& options) {
  std::vector<CheckOutcome> out;
  std::uint64_t k = 0;
  for (const auto& [name, make] : GradientProblems()) {
    const GradCheckResult r = CheckGradient(name, make, seed + 7919 * ++k, options);
    std::ostringstream detail;
    detail << r.probes << " probes, " << r.rejected << " rejected, max rel err "
           << Sci(r.max_rel_error);
    out.push_back({"grad_" + name, r.passed && r.probes >= options.min_probes,
                   detail.str()});
  }
  return out;
}

std::vector<CheckOutcome> RunOracleSuite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {CheckScoreOracle(rng),      CheckRefineOracle(rng),
          CheckRoiAlignOracle(rng),   CheckRoiAlignConstant(rng),
          CheckSoftmaxClosedForms(rng), CheckRegisterTarget(rng),
          CheckClsConfidence()};
}

bool RunKernelSelfTest(std::uint64_t seed, std::ostream& out) {
  bool all = true;
  auto report = [&](const std::vector<CheckOutcome>& v) {
    for (const CheckOutcome& c : v) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
      all = all && c.passed;
    }
  };
  report(RunGradientSuite(seed));
  report(RunOracleSuite(seed));
  return all;
}

}  // namespace egobench::selftest
