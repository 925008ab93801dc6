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

#include "cli.h"

#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egobench/conditions.h"
#include "egobench/consensus.h"
#include "egobench/error.h"
#include "egobench/eval.h"
#include "egobench/instindex.h"
#include "egobench/parallel.h"
#include "egobench/schema.h"
#include "egobench/selftest/kernel_suite.h"
#include "egobench/splits.h"
#include "egobench/stats.h"

namespace egobench::cli {

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kFailure = 2;

std::string Fixed(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string Percent(double fraction) { return Fixed(100.0 * fraction); }

void Row(std::ostream& out, const std::string& key, const std::string& value) {
  out << std::left << std::setw(14) << key << value << '\n';
}

void WriteJson(const std::string& path, const Json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

int PrintViolations(std::ostream& out, const std::vector<Violation>& vs) {
  for (const auto& v : vs) out << v.code << ": " << v.message << '\n';
  return vs.empty() ? kOk : kViolations;
}

struct Options {
  std::string dataset;
  std::string preds;
  std::string splits;
  std::string out;
  std::string csv;
  std::string stream;
  std::string preds_dir;
  std::string out_dir;
  std::string mode = "unified";
  std::string verify;
  std::string apply;
  std::string embeddings;
  std::string proposals;
  std::vector<Id> withhold;
  std::vector<Id> instances;
  std::vector<double> iou_thresholds;
  std::uint64_t seed = 0;
  int threads = 0;
  int max_dets = 0;
  int dim = kDefaultEmbeddingDim;
  double threshold = 0.5;
  double eval_fraction = 0.5;
  double withheld_fraction = 0.25;
  bool buckets = false;
};

EvalConfig MakeEvalConfig(const Options& o) {
  EvalConfig cfg;
  if (!o.iou_thresholds.empty()) cfg.iou_thresholds = o.iou_thresholds;
  if (o.max_dets > 0) cfg.max_dets = o.max_dets;
  cfg.buckets = o.buckets;
  cfg.threads = ResolveThreads(o.threads > 0 ? std::optional<int>(o.threads)
                                             : std::nullopt);
  cfg.Validate();
  return cfg;
}

int CmdValidate(const Options& o, std::ostream& out) {
  const Dataset ds = LoadDataset(o.dataset);
  const auto violations = Validate(ds);
  if (!o.out.empty()) {
    Json list = Json::array();
    for (const auto& v : violations) {
      list.push_back({{"code", v.code}, {"message", v.message}});
    }
    WriteJson(o.out, Json{{"valid", violations.empty()}, {"violations", list}});
  }
  const int rc = PrintViolations(out, violations);
  out << (violations.empty() ? "OK" : "INVALID") << ": " << ds.images().size()
      << " images, " << ds.annotations().size() << " annotations, "
      << violations.size() << " violations\n";
  return rc;
}

int CmdCoverage(const Options& o, std::ostream& out) {
  const Dataset ds = LoadDataset(o.dataset);
  std::vector<Id> ids = o.instances;
  if (ids.empty()) {
    std::set<Id> mains;
    for (const auto& v : ds.videos()) mains.insert(v.main_instance_id);
    ids.assign(mains.begin(), mains.end());
  }
  bool complete = true;
  Json reports = Json::array();
  for (Id inst : ids) {
    const CoverageReport r = CheckVideoCoverage(ds, inst);
    const auto missing = r.MissingSlots();
    complete = complete && missing.empty();
    out << "instance " << inst << (missing.empty() ? ": complete" : ": incomplete")
        << '\n';
    Json slots = Json::array();
    for (std::size_t s = 0; s < r.slot_videos.size(); ++s) {
      out << "  slot " << std::setw(2) << s + 1 << "  ";
      if (r.slot_videos[s].empty()) {
        out << "missing";
      } else {
        out << "videos";
        for (Id v : r.slot_videos[s]) out << ' ' << v;
      }
      out << '\n';
      slots.push_back(r.slot_videos[s]);
    }
    if (!r.unmatched_videos.empty()) {
      out << "  unmatched";
      for (Id v : r.unmatched_videos) out << ' ' << v;
      out << '\n';
    }
    reports.push_back({{"main_instance_id", inst},
                       {"complete", missing.empty()},
                       {"missing_slots", missing},
                       {"slot_videos", std::move(slots)},
                       {"unmatched_videos", r.unmatched_videos}});
  }
  if (!o.out.empty()) WriteJson(o.out, reports);
  return complete ? kOk : kViolations;
}

int CmdConsensus(const Options& o, std::ostream& out) {
  const Dataset ds = LoadDataset(o.dataset);
  const ConsensusResult r = ReconcileDataset(ds);
  const std::string csv = ConsensusToCsv(r);
  if (o.out.empty()) {
    out << csv;
  } else {
    WriteTextFile(o.out, csv);
    out << "reconciled " << r.images.size() << " images, skipped "
        << r.skipped_images.size() << '\n';
  }
  if (!o.apply.empty()) SaveDataset(ApplyConsensus(ds, r), o.apply);
  return kOk;
}

int CmdSplit(const Options& o, std::ostream& out) {
  const Dataset ds = LoadDataset(o.dataset);
  if (!o.verify.empty()) {
    return PrintViolations(out, VerifySplits(ds, LoadSplits(o.verify)));
  }
  const auto mode = ParseSplitMode(o.mode);
  if (!mode) {
    throw Error(ErrorCode::kInvalidArgument, "unknown split mode: " + o.mode);
  }
  SplitOptions opt;
  opt.eval_instance_fraction = o.eval_fraction;
  opt.withheld_category_fraction = o.withheld_fraction;
  opt.withheld_categories = o.withhold;
  const SplitSpec spec = BuildSplits(ds, *mode, o.seed, opt);
  if (!o.out.empty()) SaveSplits(spec, o.out);
  Row(out, "mode", std::string(ToString(*mode)));
  Row(out, "seed", std::to_string(o.seed));
  Row(out, "train", std::to_string(spec.train_images.size()) + " images");
  Row(out, "val", std::to_string(spec.val_images.size()) + " images");
  Row(out, "test", std::to_string(spec.test_images.size()) + " images");
  Row(out, "targets", std::to_string(spec.targets.size()));
  Row(out, "unseen", std::to_string(spec.unseen_instance_ids.size()));
  return PrintViolations(out, VerifySplits(ds, spec));
}

void PrintReport(std::ostream& out, const EvalReport& r) {
  Row(out, "mode", std::string(ToString(r.mode)));
  Row(out, "labels", std::to_string(r.per_label.size()));
  Row(out, "predictions", std::to_string(r.num_predictions));
  Row(out, "AP", Percent(r.ap));
  Row(out, "AP50", Percent(r.ap50));
  Row(out, "AP75", Percent(r.ap75));
  auto opt = [&out](const char* key, const std::optional<double>& v) {
    if (v) Row(out, key, Percent(*v));
  };
  if (r.mode == LabelMode::kInstance) {
    opt("AP50_seen", r.ap50_seen);
    opt("AP50_unseen", r.ap50_unseen);
  }
  if (r.buckets) {
    opt("AP50_l", r.buckets->l);
    opt("AP50_m", r.buckets->m);
    opt("AP50_s", r.buckets->s);
    opt("AP50_bright", r.buckets->bright);
    opt("AP50_dim", r.buckets->dim);
    opt("AP50_simple", r.buckets->simple);
    opt("AP50_busy", r.buckets->busy);
  }
}

void EmitReport(const Options& o, const EvalReport& r, std::ostream& out) {
  if (!o.out.empty()) WriteJson(o.out, ReportToJson(r));
  if (!o.csv.empty()) WriteTextFile(o.csv, ReportToCsv(r));
  PrintReport(out, r);
}

int CmdEvalCategory(const Options& o, std::ostream& out) {
  const EvalConfig cfg = MakeEvalConfig(o);
  const Dataset ds = LoadDataset(o.dataset);
  const auto preds = LoadPredictions(o.preds, LabelMode::kCategory, ds);
  EmitReport(o, FederatedApCategory(ds, preds, cfg), out);
  return kOk;
}

int CmdEvalInstance(const Options& o, std::ostream& out) {
  const EvalConfig cfg = MakeEvalConfig(o);
  const Dataset ds = LoadDataset(o.dataset);
  const SplitSpec spec = LoadSplits(o.splits);
  const std::set<Id> registry = spec.TargetInstances();
  const auto preds = LoadPredictions(o.preds, LabelMode::kInstance, ds, &registry);
  EmitReport(o, InstanceAp(ds, preds, spec, cfg), out);
  return kOk;
}

int CmdEvalCl(const Options& o, std::ostream& out) {
  const EvalConfig cfg = MakeEvalConfig(o);
  const ExperienceStream stream = LoadStream(o.stream);

  std::optional<Dataset> ds;
  if (!o.dataset.empty()) {
    ds = LoadDataset(o.dataset);
  } else if (stream.dataset) {
    ds = LoadDataset(*stream.dataset);
  }
  std::optional<SplitSpec> spec;
  if (!o.splits.empty()) {
    spec = LoadSplits(o.splits);
  } else if (stream.splits) {
    spec = LoadSplits(*stream.splits);
  }

  const LabelMode mode = stream.mode == StreamMode::kClassIncrementalInstance
                             ? LabelMode::kInstance
                             : LabelMode::kCategory;
  std::optional<std::set<Id>> registry;
  if (spec) registry = spec->TargetInstances();

  std::vector<std::optional<std::vector<Prediction>>> preds(
      stream.experiences.size());
  for (std::size_t i = 0; i < stream.experiences.size(); ++i) {
    const Experience& e = stream.experiences[i];
    if (e.map) continue;
    std::optional<std::filesystem::path> path = e.predictions;
    if (!path && !o.preds_dir.empty()) {
      path = std::filesystem::path(o.preds_dir) /
             ("experience_" + std::to_string(i) + ".json");
    }
    if (!path) continue;
    if (!ds) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scoring predictions requires --dataset");
    }
    preds[i] = LoadPredictions(*path, mode, *ds,
                               registry ? &*registry : nullptr);
  }

  const ClResult r = ClEvaluate(stream, preds, ds ? &*ds : nullptr,
                                spec ? &*spec : nullptr, cfg);
  if (!o.out.empty()) WriteJson(o.out, ClResultToJson(r, stream.mode));
  if (!o.csv.empty()) {
    std::ostringstream csv;
    csv << "experience,map\n";
    for (std::size_t i = 0; i < r.map.size(); ++i) {
      csv << i << ',' << Fixed(r.map[i], 4) << '\n';
    }
    csv << "EAP," << Fixed(r.eap, 4) << '\n';
    WriteTextFile(o.csv, csv.str());
  }
  Row(out, "mode", std::string(ToString(stream.mode)));
  for (std::size_t i = 0; i < r.map.size(); ++i) {
    Row(out, "E" + std::to_string(i), Fixed(r.map[i]));
  }
  out << "EAP " << Fixed(r.eap) << '\n';
  return kOk;
}

int CmdStats(const Options& o, std::ostream& out) {
  const Dataset ds = LoadDataset(o.dataset);
  const StatsReport r = ComputeStats(ds);
  WriteStatsCsv(ds, r, o.out_dir);
  Row(out, "images", std::to_string(r.num_images));
  Row(out, "annotations", std::to_string(r.num_annotations));
  Row(out, "instances", std::to_string(r.num_instances));
  Row(out, "main", std::to_string(r.main_instances));
  Row(out, "secondary", std::to_string(r.secondary_instances));
  Row(out, "inst/image", Fixed(r.mean_instances_per_image));
  Row(out, "images/inst", Fixed(r.mean_images_per_instance));
  return kOk;
}

int CmdKernelsSelftest(const Options& o, std::ostream& out) {
  return selftest::RunKernelSelfTest(o.seed, out) ? kOk : kViolations;
}

int CmdMatch(const Options& o, std::ostream& out) {
  EmbeddingIndex index(o.dim, o.threshold);
  LoadEmbeddings(o.embeddings, index);
  const auto proposals = LoadProposals(o.proposals, o.dim);
  const auto preds = MatchProposals(index, proposals);
  WriteJson(o.out, PredictionsToJson(preds, LabelMode::kInstance));
  Row(out, "targets", std::to_string(index.size()));
  Row(out, "proposals", std::to_string(proposals.size()));
  Row(out, "matched", std::to_string(preds.size()));
  return kOk;
}

void AddThreads(CLI::App* cmd, Options& o) {
  cmd->add_option("--threads", o.threads,
                  "Worker threads (default: EGOBENCH_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
}

void AddEvalFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "JSON report path");
  cmd->add_option("--csv", o.csv, "CSV table path");
  cmd->add_option("--iou-thresholds", o.iou_thresholds,
                  "IoU thresholds (default: 0.50:0.05:0.95)")
      ->delimiter(',');
  cmd->add_option("--max-dets", o.max_dets,
                  "Keep the top N detections per image and label (default: all)")
      ->check(CLI::PositiveNumber);
  AddThreads(cmd, o);
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Egocentric fine-grained detection benchmark toolkit", "egobench"};
  app.require_subcommand(1);
  int (*command)(const Options&, std::ostream&) = nullptr;
  auto bind = [&command](CLI::App* cmd, int (*fn)(const Options&, std::ostream&)) {
    cmd->callback([&command, fn] { command = fn; });
  };

  auto* validate = app.add_subcommand("validate", "Check a dataset file");
  validate->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  validate->add_option("--out", o.out, "JSON violation report");
  bind(validate, CmdValidate);

  auto* coverage =
      app.add_subcommand("coverage", "Check the 10 capture slots per main instance");
  coverage->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  coverage->add_option("--instance", o.instances,
                       "Main instance ids (default: all)")
      ->delimiter(',');
  coverage->add_option("--out", o.out, "JSON report");
  bind(coverage, CmdCoverage);

  auto* consensus =
      app.add_subcommand("consensus", "Pick a source-of-truth annotator per image");
  consensus->add_option("--dataset", o.dataset, "Multi-annotator dataset JSON")
      ->required();
  consensus->add_option("--out", o.out, "CSV of scores (default: stdout)");
  consensus->add_option("--apply", o.apply, "Write the reconciled dataset here");
  bind(consensus, CmdConsensus);

  auto* split = app.add_subcommand("split", "Build or verify train/val/test splits");
  split->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  split->add_option("--mode", o.mode, "unified or instdet")
      ->capture_default_str()
      ->check(CLI::IsMember({"unified", "instdet"}));
  split->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  split->add_option("--eval-fraction", o.eval_fraction,
                    "Fraction of instances held out of training")
      ->capture_default_str();
  split->add_option("--withheld-fraction", o.withheld_fraction,
                    "instdet: fraction of categories withheld from training")
      ->capture_default_str();
  split->add_option("--withhold", o.withhold,
                    "instdet: explicit withheld category ids")
      ->delimiter(',');
  split->add_option("--out", o.out, "Split JSON");
  split->add_option("--verify", o.verify, "Verify an existing split file instead");
  bind(split, CmdSplit);

  auto* eval = app.add_subcommand("eval", "Compute detection metrics");
  eval->require_subcommand(1);
  auto* category = eval->add_subcommand("category", "Federated category-level AP");
  category->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  category->add_option("--preds", o.preds, "Prediction JSON")->required();
  category->add_flag("--buckets", o.buckets, "Add size, lighting and background AP50");
  AddEvalFlags(category, o);
  bind(category, CmdEvalCategory);

  auto* instance = eval->add_subcommand("instance", "Instance-level AP");
  instance->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  instance->add_option("--preds", o.preds, "Prediction JSON")->required();
  instance->add_option("--splits", o.splits, "Split JSON")->required();
  instance->add_flag("--buckets", o.buckets, "Add size, lighting and background AP50");
  AddEvalFlags(instance, o);
  bind(instance, CmdEvalInstance);

  auto* cl = eval->add_subcommand("cl", "Continual-learning EAP");
  cl->add_option("--stream", o.stream, "Experience stream JSON")->required();
  cl->add_option("--preds-dir", o.preds_dir,
                 "Directory of experience_<k>.json predictions (k from 0)");
  cl->add_option("--dataset", o.dataset, "Dataset JSON (overrides the stream)");
  cl->add_option("--splits", o.splits, "Split JSON (overrides the stream)");
  AddEvalFlags(cl, o);
  bind(cl, CmdEvalCl);

  auto* stats = app.add_subcommand("stats", "Dataset statistics as CSV");
  stats->add_option("--dataset", o.dataset, "Dataset JSON")->required();
  stats->add_option("--out-dir", o.out_dir, "Output directory")->required();
  bind(stats, CmdStats);

  auto* kernels = app.add_subcommand("kernels", "Detection-head kernels");
  kernels->require_subcommand(1);
  auto* selftest =
      kernels->add_subcommand("selftest", "Gradient and oracle checks");
  selftest->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  bind(selftest, CmdKernelsSelftest);

  auto* match =
      app.add_subcommand("match", "Match proposals to registered target embeddings");
  match->add_option("--embeddings", o.embeddings, "Target embedding JSON")
      ->required();
  match->add_option("--proposals", o.proposals, "Proposal JSON")->required();
  match->add_option("--out", o.out, "Instance prediction JSON")->required();
  match->add_option("--dim", o.dim, "Embedding dimension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  match->add_option("--threshold", o.threshold, "Cosine threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bind(match, CmdMatch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kFailure;
  }

  try {
    return command(o, out);
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kFailure;
}

}  // namespace egobench::cli
