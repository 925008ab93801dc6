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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "egobench/conditions.h"
#include "egobench/consensus.h"
#include "egobench/error.h"
#include "egobench/eval.h"
#include "egobench/kernels.h"
#include "egobench/losses.h"
#include "egobench/selftest/kernel_oracles.h"
#include "egobench/selftest/kernel_suite.h"
#include "egobench/splits.h"
#include "test_util.h"

namespace egobench {
namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Num(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string Sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

// Per-experience mAP rows with the EAP each should round to.
Verdict EapArithmetic() {
  struct Row {
    const char* name;
    std::array<double, 5> maps;
    double expected;
  };
  const Row rows[] = {
      {"instance rank1", {23.3, 39.5, 54.6, 70.2, 85.6}, 54.7},
      {"instance rank2", {15.1, 30.4, 45.5, 60.8, 75.4}, 45.4},
      {"instance rank3", {14.7, 29.1, 42.3, 55.4, 66.9}, 41.7},
      {"category rank1", {30.6, 47.2, 58.1, 67.5, 76.2}, 55.9},
      {"category rank2", {28.4, 44.7, 57.6, 67.9, 78.2}, 55.4},
      {"category rank3", {19.5, 34.5, 43.9, 52.7, 61.5}, 42.4},
  };
  constexpr double kTolerance = 0.05;
  const auto start = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (const Row& r : rows) {
    const double eap = ExperienceAveragePrecision(r.maps);
    const double diff = std::abs(eap - r.expected);
    const bool row_ok = diff <= kTolerance + 1e-12;
    ok = ok && row_ok;
    if (!row_ok) {
      detail << r.name << " EAP " << Num(eap, 2) << " vs " << Num(r.expected, 1)
             << " (|diff| " << Num(diff, 2) << " > " << kTolerance << "); ";
    }
  }
  const double secs = Seconds(start);
  ok = ok && secs < 1.0;
  detail << "6 rows in " << Num(secs, 4) << " s";
  return {ok, detail.str()};
}

Verdict OracleEquivalence() {
  constexpr int kCases = 1000;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  int mismatches = 0;
  int first_bad = -1;
  for (int t = 0; t < kCases; ++t) {
    const testing::MicroCase mc = testing::RandomMicroCase(rng);
    const EvalReport r = FederatedApCategory(mc.dataset, mc.predictions, {});
    const OracleSummary o =
        BruteForceFederatedOracle(mc.dataset, mc.predictions, DefaultIouThresholds());
    if (r.ap != o.ap || r.ap50 != o.ap50 || r.ap75 != o.ap75) {
      ++mismatches;
      if (first_bad < 0) first_bad = t;
    }
  }
  const double secs = Seconds(start);
  std::ostringstream detail;
  detail << kCases << " cases, " << mismatches << " mismatches";
  if (first_bad >= 0) detail << " (first at case " << first_bad << ")";
  detail << ", " << Num(secs, 2) << " s";
  return {mismatches == 0 && secs < 30.0, detail.str()};
}

Verdict FederatedGating() {
  constexpr int kTrials = 100;
  std::mt19937_64 rng(77);
  int changed = 0;
  std::size_t injected = 0;
  EvalConfig cfg;
  cfg.buckets = true;
  for (int t = 0; t < kTrials; ++t) {
    const testing::MicroCase mc = testing::RandomMicroCase(rng);
    const EvalReport before = FederatedApCategory(mc.dataset, mc.predictions, cfg);
    std::vector<Prediction> more = mc.predictions;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& img : mc.dataset.images()) {
      for (const auto& c : mc.dataset.categories()) {
        bool evaluated = std::binary_search(img.neg_category_ids.begin(),
                                            img.neg_category_ids.end(), c.id);
        for (std::size_t ai : mc.dataset.AnnotationIndicesForImage(img.id)) {
          evaluated = evaluated || mc.dataset.annotations()[ai].category_id == c.id;
        }
        if (evaluated) continue;
        const int n = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < n; ++k) {
          const Box b{80 * u(rng), 80 * u(rng), 1 + 19 * u(rng), 1 + 19 * u(rng)};
          more.insert(more.begin() + static_cast<long>(rng() % (more.size() + 1)),
                      Prediction{img.id, c.id, b, u(rng)});
          ++injected;
        }
      }
    }
    const EvalReport after = FederatedApCategory(mc.dataset, more, cfg);
    if (ReportToJson(before).dump() != ReportToJson(after).dump() ||
        before.ap != after.ap || before.ap50 != after.ap50 ||
        before.ap75 != after.ap75) {
      ++changed;
    }
  }
  std::ostringstream detail;
  detail << kTrials << " trials, " << injected << " injected predictions, "
         << changed << " reports changed";
  return {changed == 0 && injected > 0, detail.str()};
}

Verdict GradientSuite() {
  const auto start = Clock::now();
  const selftest::GradCheckOptions options;
  const auto outcomes = selftest::RunGradientSuite(4242, options);
  const double secs = Seconds(start);
  bool ok = !outcomes.empty();
  std::ostringstream detail;
  for (const auto& c : outcomes) {
    if (!c.passed) {
      ok = false;
      detail << c.name << " failed (" << c.detail << "); ";
    }
  }
  ok = ok && secs < 60.0;
  detail << outcomes.size() << " ops, >= " << options.min_probes
         << " probes each, step " << options.step << ", rel tol " << options.tolerance
         << ", " << Num(secs, 2) << " s";
  return {ok, detail.str()};
}

Verdict CenterClosedForms() {
  const CenterPrediction uniform = SoftmaxCenter(Tensor3(1, 5, 5, 0.3));
  const double e_uniform =
      std::max(std::abs(uniform.c_y - 2.0), std::abs(uniform.c_x - 2.0));

  Tensor3 spike(1, 5, 5);
  spike.at(0, 1, 3) = 1000.0;
  const CenterPrediction one_hot = SoftmaxCenter(spike);
  const double e_one_hot =
      std::max(std::abs(one_hot.c_y - 1.0), std::abs(one_hot.c_x - 3.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> shift(-500.0, 500.0);
  double e_shift = 0.0;
  for (int t = 0; t < 200; ++t) {
    Tensor3 m(1, 5, 5);
    for (double& v : m.data()) v = u(rng);
    Tensor3 moved = m;
    const double k = shift(rng);
    for (double& v : moved.data()) v += k;
    const CenterPrediction a = SoftmaxCenter(m);
    const CenterPrediction b = SoftmaxCenter(moved);
    e_shift = std::max({e_shift, std::abs(a.c_y - b.c_y), std::abs(a.c_x - b.c_x)});
  }
  std::ostringstream detail;
  detail << "uniform " << Sci(e_uniform) << " (<= 1e-9), one-hot " << Sci(e_one_hot)
         << " (<= 1e-6), shift " << Sci(e_shift) << " (<= 1e-9)";
  return {e_uniform <= 1e-9 && e_one_hot <= 1e-6 && e_shift <= 1e-9, detail.str()};
}

Verdict RoiAlignOracle() {
  double worst = 0.0;
  int fixtures = 0;
  Tensor3 hand(1, 2, 2);
  hand.at(0, 0, 1) = 1;
  hand.at(0, 1, 0) = 2;
  hand.at(0, 1, 1) = 3;
  worst = selftest::MaxAbsDiff(RoiAlign(hand, {0, 0, 2, 2}, 2),
                               selftest::BruteForceRoiAlign(hand, {0, 0, 2, 2}, 2));
  ++fixtures;

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool constant_exact = true;
  for (int t = 0; t < 300; ++t) {
    const int c = 1 + static_cast<int>(rng() % 3);
    const int h = 1 + static_cast<int>(rng() % 8);
    const int w = 1 + static_cast<int>(rng() % 8);
    Tensor3 f(c, h, w);
    for (double& v : f.data()) v = 4.0 * u(rng) - 2.0;
    const double x1 = -1.0 + (w + 0.9) * u(rng);
    const double y1 = -1.0 + (h + 0.9) * u(rng);
    const double x2 = std::max(x1, 0.0) + 0.1 + (w + 1.0 - std::max(x1, 0.0)) * u(rng);
    const double y2 = std::max(y1, 0.0) + 0.1 + (h + 1.0 - std::max(y1, 0.0)) * u(rng);
    const Box box{x1, y1, x2 - x1, y2 - y1};
    const int out = 1 + static_cast<int>(rng() % 5);
    const int ratio = 1 + static_cast<int>(rng() % 3);
    worst = std::max(worst, selftest::MaxAbsDiff(RoiAlign(f, box, out, ratio),
                                                 selftest::BruteForceRoiAlign(
                                                     f, box, out, ratio)));
    ++fixtures;

    const double value = 10.0 * u(rng) - 5.0;
    const double ix = (w - 0.1) * u(rng);
    const double iy = (h - 0.1) * u(rng);
    const Box inside{ix, iy, 0.1 + (w - 0.1 - ix) * u(rng),
                     0.1 + (h - 0.1 - iy) * u(rng)};
    const Tensor3 pooled = RoiAlign(Tensor3(c, h, w, value), inside, out, ratio);
    for (double v : pooled.data()) {
      constant_exact = constant_exact && v == value;
    }
  }
  std::ostringstream detail;
  detail << fixtures << " fixtures, max |diff| " << Sci(worst)
         << " (<= 1e-9), constant maps " << (constant_exact ? "exact" : "NOT exact");
  return {worst <= 1e-9 && constant_exact, detail.str()};
}

Verdict ConditionRules() {
  bool ok = ClassifyDistance(0.35, 1.0) == Distance::kNear &&
            ClassifyDistance(0.25, 1.0) == Distance::kMedium &&
            ClassifyDistance(0.10, 1.0) == Distance::kFar;
  using D = Distance;
  using M = Motion;
  using B = Background;
  using L = Lighting;
  const std::array<CaptureConfig, 10> table{{
      {1, D::kNear, M::kHorizontal, B::kSimple, L::kBright},
      {2, D::kMedium, M::kHorizontal, B::kSimple, L::kBright},
      {3, D::kNear, M::kHorizontal, B::kSimple, L::kDim},
      {4, D::kMedium, M::kHorizontal, B::kBusy, L::kBright},
      {5, D::kFar, M::kHorizontal, B::kBusy, L::kBright},
      {6, D::kMedium, M::kVertical, B::kBusy, L::kBright},
      {7, D::kMedium, M::kCombined, B::kBusy, L::kBright},
      {8, D::kNear, M::kHorizontal, B::kBusy, L::kDim},
      {9, D::kMedium, M::kHorizontal, B::kBusy, L::kDim},
      {10, D::kFar, M::kHorizontal, B::kBusy, L::kDim},
  }};
  int matching_rows = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    matching_rows += CanonicalConfigs()[i] == table[i] ? 1 : 0;
  }
  ok = ok && matching_rows == 10;
  return {ok, "distance probes 0.35/0.25/0.10, " + std::to_string(matching_rows) +
                  "/10 canonical rows match"};
}

Verdict Consensus() {
  auto ann = [](const Box& b) {
    BoxAnnotation a;
    a.image_id = 1;
    a.category_id = 1;
    a.bbox = b;
    return a;
  };
  const AnnotatorSet base{{11, {ann({0, 0, 10, 10})}},
                          {12, {ann({0, 0, 10, 10})}},
                          {13, {ann({40, 40, 10, 10})}}};
  const std::vector<double> scores = ConsensusScores(base);
  bool ok = scores == std::vector<double>{0.5, 0.5, 0.0} &&
            SelectSourceOfTruth(base) == 11;
  std::array<int, 3> order{0, 1, 2};
  int orderings = 0;
  int equivariant = 0;
  do {
    AnnotatorSet set;
    for (int k : order) set.push_back(base[k]);
    const auto s = ConsensusScores(set);
    bool same = SelectSourceOfTruth(set) == 11;
    for (int k = 0; k < 3; ++k) same = same && s[k] == scores[order[k]];
    equivariant += same ? 1 : 0;
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));
  ok = ok && orderings == 6 && equivariant == 6;
  std::ostringstream detail;
  detail << "scores (" << scores[0] << ", " << scores[1] << ", " << scores[2]
         << "), winner " << SelectSourceOfTruth(base) << ", " << equivariant << "/"
         << orderings << " orderings equivariant";
  return {ok, detail.str()};
}

Verdict Splits() {
  constexpr int kDatasets = 50;
  std::mt19937_64 rng(31);
  int clean = 0;
  int builds = 0;
  int trials = 0;
  int detected = 0;
  std::string first_problem;
  for (int d = 0; d < kDatasets; ++d) {
    const Dataset ds = testing::RandomToyDataset(rng);
    for (SplitMode mode : {SplitMode::kUnified, SplitMode::kInstDet}) {
      ++builds;
      SplitSpec spec;
      try {
        spec = BuildSplits(ds, mode, static_cast<std::uint64_t>(d));
      } catch (const Error& e) {
        if (first_problem.empty()) first_problem = e.what();
        continue;
      }
      const auto violations = VerifySplits(ds, spec);
      if (violations.empty()) {
        ++clean;
      } else if (first_problem.empty()) {
        first_problem = violations.front().code + ": " + violations.front().message;
      }

      // Leak mutations: move an image showing a target instance into train.
      const std::set<Id> targets = spec.TargetInstances();
      std::vector<Id> leaky;
      for (const auto& a : ds.annotations()) {
        if (a.instance_id && targets.count(*a.instance_id)) leaky.push_back(a.image_id);
      }
      std::sort(leaky.begin(), leaky.end());
      leaky.erase(std::unique(leaky.begin(), leaky.end()), leaky.end());
      for (int m = 0; m < 3 && !leaky.empty(); ++m) {
        const Id img = leaky[rng() % leaky.size()];
        SplitSpec mutated = spec;
        for (auto* list : {&mutated.val_images, &mutated.test_images}) {
          list->erase(std::remove(list->begin(), list->end(), img), list->end());
        }
        mutated.train_images.push_back(img);
        const auto vs = VerifySplits(ds, mutated);
        ++trials;
        detected += std::any_of(vs.begin(), vs.end(), [](const Violation& v) {
          return v.code == "LEAKED_INSTANCE";
        });
      }
    }
  }
  std::ostringstream detail;
  detail << clean << "/" << builds << " splits verify clean, " << detected << "/"
         << trials << " leaks detected";
  if (!first_problem.empty()) detail << "; first problem: " << first_problem;
  return {clean == builds && trials > 0 && detected == trials, detail.str()};
}

Verdict LossAssignment() {
  const LossConfig cfg;
  const Box gt{0, 0, 10, 10};
  auto input = [](double iou) {
    LossInput in;
    in.size_y = 10.0;
    in.size_x = 10.0 * iou;
    in.center_y = 5.0;
    in.center_x = 0.5 * in.size_x;
    in.confidence = 0.6;
    return in;
  };
  const LossResult pos = DetectionLoss(input(0.75), gt, cfg, ImageRole::kPositive);
  const LossResult neg = DetectionLoss(input(0.25), gt, cfg, ImageRole::kPositive);
  const LossResult mid = DetectionLoss(input(0.5), gt, cfg, ImageRole::kPositive);
  const bool ok = pos.label == AssignedLabel::kPositive &&
                  std::abs(pos.classification + std::log(0.6)) < 1e-12 &&
                  neg.label == AssignedLabel::kNegative &&
                  std::abs(neg.classification + std::log(0.4)) < 1e-12 &&
                  mid.label == AssignedLabel::kIgnored && mid.classification == 0.0 &&
                  mid.total == cfg.positive_weight * mid.localization &&
                  cfg.iou_pos == 0.7 && cfg.iou_neg == 0.3;
  std::ostringstream detail;
  detail << "IoU " << Num(pos.iou, 2) << " positive, " << Num(neg.iou, 2)
         << " negative, " << Num(mid.iou, 2) << " ignored (BCE "
         << mid.classification << ")";
  return {ok, detail.str()};
}

int RunCli(const std::vector<std::string>& args, std::string& out) {
  std::vector<const char*> argv{"egobench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str() + e.str();
  return code;
}

Verdict CliDeterminism() {
  testing::TempDir dir;
  const testing::MicroCase mc = testing::RandomLargeCase(2024, 2000, 40, 10);
  SaveDataset(mc.dataset, dir / "dataset.json");
  WriteTextFile(dir / "preds.json",
                PredictionsToJson(mc.predictions, LabelMode::kCategory).dump());

  std::mt19937_64 rng(8);
  const Dataset toy = testing::RandomToyDataset(rng);
  SaveDataset(toy, dir / "toy.json");
  const SplitSpec spec = BuildSplits(toy, SplitMode::kInstDet, 3);
  SaveSplits(spec, dir / "splits.json");
  std::vector<Prediction> inst_preds;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Id img : spec.EvaluationImages()) {
    for (Id inst : spec.TargetInstances()) {
      inst_preds.push_back({img, inst, {100 * u(rng), 100 * u(rng), 50 + 100 * u(rng),
                                        50 + 100 * u(rng)},
                            u(rng)});
    }
    for (std::size_t ai : toy.AnnotationIndicesForImage(img)) {
      const auto& a = toy.annotations()[ai];
      if (a.instance_id && spec.TargetInstances().count(*a.instance_id)) {
        inst_preds.push_back({img, *a.instance_id, a.bbox, u(rng)});
      }
    }
  }
  WriteTextFile(dir / "inst_preds.json",
                PredictionsToJson(inst_preds, LabelMode::kInstance).dump());

  struct Job {
    std::string name;
    std::vector<std::string> args;
  };
  const std::vector<Job> jobs{
      {"category",
       {"eval", "category", "--dataset", (dir / "dataset.json").string(), "--preds",
        (dir / "preds.json").string(), "--buckets"}},
      {"instance",
       {"eval", "instance", "--dataset", (dir / "toy.json").string(), "--preds",
        (dir / "inst_preds.json").string(), "--splits", (dir / "splits.json").string(),
        "--buckets"}},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const Job& job : jobs) {
    std::string outputs[2];
    std::string reports[2];
    std::string tables[2];
    int k = 0;
    for (const char* threads : {"1", "8"}) {
      const auto report = dir / (job.name + "_t" + threads + ".json");
      const auto table = dir / (job.name + "_t" + threads + ".csv");
      std::vector<std::string> args = job.args;
      args.insert(args.end(), {"--threads", threads, "--out", report.string(), "--csv",
                               table.string()});
      if (RunCli(args, outputs[k]) != 0) {
        ok = false;
        detail << job.name << " run failed: " << outputs[k] << "; ";
      }
      reports[k] = testing::ReadFile(report);
      tables[k] = testing::ReadFile(table);
      ++k;
    }
    const bool same = !reports[0].empty() && reports[0] == reports[1] &&
                      tables[0] == tables[1] && outputs[0] == outputs[1];
    ok = ok && same;
    detail << job.name << " " << (same ? "identical" : "DIFFERENT") << " ("
           << reports[0].size() << " bytes); ";
  }
  detail << mc.predictions.size() << " category predictions, threads 1 vs 8";
  return {ok, detail.str()};
}

}  // namespace
}  // namespace egobench

int main() {
  using egobench::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"eap_arithmetic", egobench::EapArithmetic},
      {"federated_ap_oracle_equivalence", egobench::OracleEquivalence},
      {"federated_gating", egobench::FederatedGating},
      {"kernel_gradient_suite", egobench::GradientSuite},
      {"center_closed_forms", egobench::CenterClosedForms},
      {"roi_align_oracle", egobench::RoiAlignOracle},
      {"condition_rules", egobench::ConditionRules},
      {"consensus", egobench::Consensus},
      {"splits", egobench::Splits},
      {"loss_assignment", egobench::LossAssignment},
      {"cli_determinism", egobench::CliDeterminism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.passed ? "PASS " : "FAIL ") << name << ": " << v.detail
              << std::endl;
    failed += v.passed ? 0 : 1;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
