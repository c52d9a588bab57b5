// tools/speechground.cpp

// Copyright 2026  The speechground Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: dataset generation, training, evaluation, ablation
// sweeps, gradient checks and chart emission.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "speechground/ablation.hpp"
#include "speechground/config.hpp"
#include "speechground/dataset_io.hpp"
#include "speechground/plot.hpp"
#include "speechground/trainer.hpp"

namespace fs = std::filesystem;
namespace sg = speechground;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public sg::Error {
 public:
  using sg::Error::Error;
};

struct CommonOptions {
  std::string config_path;
  int64_t seed = -1;
  std::string out;
  bool force = false;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App *cmd, CommonOptions &o, bool out_required = true) {
  cmd->add_option("--config", o.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)")->check(CLI::NonNegativeNumber);
  auto *out = cmd->add_option("--out", o.out, "output directory");
  if (out_required) out->required();
  cmd->add_flag("--force", o.force, "write into a non-empty output directory");
  cmd->add_option("--set", o.overrides, "override one config key (key=value), repeatable");
}

sg::Config ResolveConfig(const CommonOptions &o) {
  sg::Config cfg = o.config_path.empty() ? sg::Config{} : sg::LoadConfig(o.config_path);
  for (const auto &kv : o.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    sg::SetConfigValue(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed >= 0) cfg.train.seed = static_cast<uint64_t>(o.seed);
  return cfg;
}

void PrepareOutDir(const fs::path &dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw sg::Error(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force)
      throw sg::Error("output directory " + dir.string() +
                      " is not empty; pass --force to write into it");
  }
  fs::create_directories(dir);
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sg::Error("cannot write " + path.string());
  out << text;
  if (!out) throw sg::Error("failed writing " + path.string());
}

// The manifest and the config snapshot go out before any computation.
void WriteManifest(const fs::path &dir, const std::string &command,
                   const std::vector<std::string> &args, const CommonOptions &o,
                   const sg::Config &cfg) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["arguments"] = args;
  m["config_path"] = o.config_path;
  nlohmann::ordered_json snapshot;
  for (const auto &k : sg::ConfigKeys()) snapshot[k.key] = sg::GetConfigValue(cfg, k.key);
  m["config"] = snapshot;
  m["out_dir"] = dir.string();
  m["version"] = SPEECHGROUND_VERSION;
  WriteText(dir / "manifest.json", m.dump(2) + "\n");
  WriteText(dir / "config.txt", sg::ConfigToText(cfg));
}

struct Splits {
  sg::Dataset train, val;
};

Splits LoadSplits(const fs::path &dir) {
  return {sg::LoadDataset(dir / "train"), sg::LoadDataset(dir / "val")};
}

std::string FormatBreakdown(const sg::Breakdown &b) {
  std::ostringstream s;
  auto row = [&](const char *name, const std::array<sg::BreakdownCell, 2> &c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-8s Acc@0.25 %6.2f  Acc@0.5 %6.2f  (n=%d)\n", name,
                  c[0].accuracy, c[1].accuracy, c[0].n);
    s << buf;
  };
  if (b.unique) row("unique", *b.unique);
  if (b.multiple) row("multiple", *b.multiple);
  row("overall", b.overall);
  return s.str();
}

int CmdGenData(const CommonOptions &o, const std::vector<std::string> &args, int scenes,
               int val_scenes, int per_scene) {
  sg::Config cfg = ResolveConfig(o);
  if (scenes >= 0) cfg.scenes = scenes;
  if (val_scenes >= 0) cfg.val_scenes = val_scenes;
  if (per_scene >= 0) cfg.utterances_per_scene = per_scene;
  if (cfg.scenes < 1) throw UsageError("--scenes must be at least 1");
  if (cfg.val_scenes < 0) throw UsageError("--val-scenes must be >= 0");
  if (cfg.utterances_per_scene < 1 || cfg.val_utterances_per_scene < 1)
    throw UsageError("utterances per scene must be at least 1");
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "gen-data", args, o, cfg);

  sg::DatasetSpec train_spec{cfg.scenes, cfg.utterances_per_scene, cfg.train.seed, "scene"};
  sg::Dataset train = sg::GenerateDataset(train_spec, cfg.gen);
  sg::SaveDataset(train, out / "train");
  sg::SubsetCounts counts = sg::CountSubsets(train);
  std::printf("train: %zu scenes, %zu utterances, unique %.1f%%, multiple %.1f%%\n",
              train.scenes.size(), train.utterances.size(), 100.0 * counts.unique_fraction(),
              100.0 - 100.0 * counts.unique_fraction());
  if (cfg.val_scenes > 0) {
    sg::DatasetSpec val_spec{cfg.val_scenes, cfg.val_utterances_per_scene,
                             sg::MixSeed(cfg.train.seed, 0x7a1), "val"};
    sg::Dataset val = sg::GenerateDataset(val_spec, cfg.gen);
    sg::SaveDataset(val, out / "val");
    sg::SubsetCounts vc = sg::CountSubsets(val);
    std::printf("val: %zu scenes, %zu utterances, unique %.1f%%, multiple %.1f%%\n",
                val.scenes.size(), val.utterances.size(), 100.0 * vc.unique_fraction(),
                100.0 - 100.0 * vc.unique_fraction());
  }
  return 0;
}

fs::path DataDirOf(const std::string &flag, const sg::Config &cfg) {
  return flag.empty() ? fs::path(cfg.data_dir) : fs::path(flag);
}

int CmdTrain(const CommonOptions &o, const std::vector<std::string> &args,
             const std::string &data_flag) {
  sg::Config cfg = ResolveConfig(o);
  cfg.train.Validate();
  if (!data_flag.empty()) cfg.data_dir = data_flag;
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "train", args, o, cfg);

  Splits data = LoadSplits(DataDirOf(data_flag, cfg));
  auto train = sg::PrepareSamples(data.train, cfg.train.input, cfg.gen, cfg.train.train_limit);
  std::vector<sg::Sample> clean;
  if (cfg.train.clean_epochs > 0) {
    sg::InputConfig c = cfg.train.input;
    c.noise_level = 0.0;
    c.rate_scale = 1.0;
    clean = sg::PrepareSamples(data.train, c, cfg.gen, cfg.train.train_limit);
  }
  auto val = sg::PrepareSamples(data.val, cfg.train.input, cfg.gen);
  sg::TrainingData td{&train, cfg.train.clean_epochs > 0 ? &clean : nullptr,
                      val.empty() ? nullptr : &val};
  sg::TrainResult result = sg::Train(cfg.train, td, [](const sg::EpochLog &e) {
    std::printf("epoch %3d  loss %.4f (ref %.4f, cls %.4f, contrastive %.4f)", e.epoch, e.total,
                e.ref, e.cls, e.contrastive);
    if (e.validation)
      std::printf("  val Acc@0.25 %.2f Acc@0.5 %.2f", e.validation->overall[0].accuracy,
                  e.validation->overall[1].accuracy);
    std::printf("\n");
    std::fflush(stdout);
  });
  result.model.params().Save(out / "model.ckpt");
  result.log.checkpoint = "model.ckpt";
  result.log.Write(out / "runlog.jsonl");
  if (!result.log.epochs.empty() && result.log.epochs.back().validation) {
    sg::WriteBreakdownCsv(*result.log.epochs.back().validation, out / "metrics.csv");
    std::printf("validation:\n%s", FormatBreakdown(*result.log.epochs.back().validation).c_str());
  }
  return 0;
}

int CmdEval(CommonOptions o, const std::vector<std::string> &args, const std::string &data_flag,
            const std::string &checkpoint, double beta, const std::string &split,
            bool match_rate) {
  if (o.config_path.empty()) {
    fs::path sibling = fs::path(checkpoint).parent_path() / "config.txt";
    if (fs::exists(sibling)) o.config_path = sibling.string();
  }
  sg::Config cfg = ResolveConfig(o);
  if (beta >= 0.0) cfg.train.loss.beta = beta;
  cfg.train.Validate();
  if (!data_flag.empty()) cfg.data_dir = data_flag;
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "eval", args, o, cfg);

  sg::Model model = sg::LoadModel(cfg.train, checkpoint);
  sg::Dataset dataset = sg::LoadDataset(DataDirOf(data_flag, cfg) / split);
  auto samples = sg::PrepareSamples(dataset, cfg.train.input, cfg.gen);
  auto scores = sg::Infer(model, samples);
  auto records = sg::MakeRecords(model, scores, samples, cfg.train.loss.beta);
  sg::Breakdown b = sg::ComputeBreakdown(records);
  sg::WriteBreakdownCsv(b, out / "metrics.csv");
  std::printf("%s (beta %.2f):\n%s", split.c_str(), cfg.train.loss.beta, FormatBreakdown(b).c_str());
  if (match_rate) {
    char line[64];
    std::snprintf(line, sizeof line, "match_rate\n%.4f\n", sg::MatchRate(records));
    WriteText(out / "match_rate.csv", line);
    std::printf("match rate %.2f\n", sg::MatchRate(records));
  }
  return 0;
}

std::vector<double> ParseList(const std::string &s, const char *what) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw UsageError(std::string("bad ") + what + " list '" + s + "'");
    }
  }
  return out;
}

int CmdAblate(const CommonOptions &o, const std::vector<std::string> &args,
              const std::string &data_flag, const std::string &sweep, const std::string &seeds,
              const std::string &values) {
  sg::Config cfg = ResolveConfig(o);
  cfg.train.Validate();
  if (!data_flag.empty()) cfg.data_dir = data_flag;
  sg::AblationSpec spec;
  spec.kind = sg::SweepKindFromString(sweep);
  spec.seeds.clear();
  for (double s : ParseList(seeds, "seed")) {
    if (s < 0 || s != static_cast<double>(static_cast<uint64_t>(s)))
      throw UsageError("seeds must be non-negative integers");
    spec.seeds.push_back(static_cast<uint64_t>(s));
  }
  if (spec.seeds.empty()) {
    for (uint64_t k = 0; k < 3; ++k) spec.seeds.push_back(cfg.train.seed + k);
  }
  spec.values = ParseList(values, "value");
  spec.threads = sg::ThreadsFromEnvironment();
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "ablate", args, o, cfg);

  Splits data = LoadSplits(DataDirOf(data_flag, cfg));
  sg::AblationTable table = sg::RunAblation(cfg.train, cfg.gen, data.train, data.val, spec,
                                            [](const std::string &msg) {
                                              std::printf("%s\n", msg.c_str());
                                              std::fflush(stdout);
                                            });
  WriteText(out / "ablation.csv", table.ToCsv());
  WriteText(out / "ablation_summary.csv", table.SummaryCsv());
  std::printf("%s", table.SummaryCsv().c_str());
  return 0;
}

int CmdGradcheck(const CommonOptions &o, const std::vector<std::string> &args) {
  sg::Config cfg = ResolveConfig(o);
  cfg.train.Validate();
  if (cfg.gradcheck_samples < 1 || cfg.gradcheck_proposals < 1)
    throw UsageError("gradcheck needs at least one sample and one proposal");
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "gradcheck", args, o, cfg);

  // A small scene set whose object counts fit the proposal budget.
  sg::GenConfig gen = cfg.gen;
  gen.max_objects = std::min(gen.max_objects, cfg.gradcheck_proposals);
  gen.min_objects = std::min(gen.min_objects, gen.max_objects);
  sg::DatasetSpec spec{cfg.gradcheck_samples, 1, cfg.train.seed, "check"};
  sg::Dataset dataset = sg::GenerateDataset(spec, gen);
  sg::InputConfig input = cfg.train.input;
  input.num_proposals = cfg.gradcheck_proposals;
  auto samples = sg::PrepareSamples(dataset, input, gen);
  sg::GradCheckReport report =
      sg::GradCheckModel(cfg.train, samples, cfg.gradcheck_epsilon, cfg.gradcheck_entries);

  std::string csv = "group,rel_error,entries\n";
  for (const auto &g : report.groups) {
    char line[200];
    std::snprintf(line, sizeof line, "%s,%.6e,%d\n", g.name.c_str(), g.rel_error, g.entries);
    csv += line;
    std::printf("%-28s %.3e  (%d entries)\n", g.name.c_str(), g.rel_error, g.entries);
  }
  WriteText(out / "gradcheck.csv", csv);
  std::printf("max relative error %.3e in %s\n", report.max_rel_error, report.worst.c_str());
  if (!(report.max_rel_error < 1e-4)) {
    std::fprintf(stderr, "gradcheck failed: relative error %.3e >= 1e-4\n", report.max_rel_error);
    return kExitRuntime;
  }
  return 0;
}

int CmdPlot(const CommonOptions &o, const std::vector<std::string> &args,
            const std::vector<std::string> &inputs) {
  sg::Config cfg = ResolveConfig(o);
  // Inputs are validated before anything is written.
  for (const auto &in : inputs) {
    if (fs::path(in).extension() == ".jsonl")
      sg::ReadRunLog(in);
    else
      sg::ReadAblationResults(in);
  }
  const fs::path out = o.out;
  PrepareOutDir(out, o.force);
  WriteManifest(out, "plot", args, o, cfg);
  for (const auto &in : inputs)
    for (const auto &p : sg::PlotFile(in, out)) std::printf("wrote %s\n", p.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  speechground::TuneAllocator();
  CLI::App app{"Speech-guided 3D grounding laboratory", "speechground"};
  app.set_version_flag("--version", SPEECHGROUND_VERSION);
  app.require_subcommand(1);
  std::vector<std::string> args(argv, argv + argc);

  CommonOptions gen_o, train_o, eval_o, ablate_o, grad_o, plot_o;
  int scenes = -1, val_scenes = -1, per_scene = -1;
  auto *gen = app.add_subcommand("gen-data", "generate train/val scenes and utterances");
  AddCommon(gen, gen_o);
  gen->add_option("--scenes", scenes, "training scenes");
  gen->add_option("--val-scenes", val_scenes, "validation scenes");
  gen->add_option("--utterances-per-scene", per_scene, "training utterances per scene");

  std::string train_data;
  auto *train = app.add_subcommand("train", "train a grounder");
  AddCommon(train, train_o);
  train->add_option("--data", train_data, "dataset directory (holds train/ and val/)");

  std::string eval_data, checkpoint, split = "val";
  double beta = -1.0;
  bool match_rate = false;
  auto *eval = app.add_subcommand("eval", "evaluate a checkpoint");
  AddCommon(eval, eval_o);
  eval->add_option("--data", eval_data, "dataset directory");
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--beta", beta, "speech share of the fused score")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--split", split, "train or val")->check(CLI::IsMember({"train", "val"}));
  eval->add_flag("--match-rate", match_rate, "also report predicted-index match rate");

  std::string ablate_data, sweep = "modules", seeds, values;
  auto *ablate = app.add_subcommand("ablate", "run an ablation sweep over several seeds");
  AddCommon(ablate, ablate_o);
  ablate->add_option("--data", ablate_data, "dataset directory");
  ablate->add_option("--sweep", sweep, "modules, alignment, beta, rate or noise");
  ablate->add_option("--seeds", seeds, "comma-separated seeds (default: seed, seed+1, seed+2)");
  ablate->add_option("--values", values, "comma-separated grid for beta/rate/noise sweeps");

  auto *grad = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  AddCommon(grad, grad_o);

  std::vector<std::string> plot_inputs;
  auto *plot = app.add_subcommand("plot", "emit SVG charts from results files");
  AddCommon(plot, plot_o);
  plot->add_option("inputs", plot_inputs, "ablation CSV or run log files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return CmdGenData(gen_o, args, scenes, val_scenes, per_scene);
    if (*train) return CmdTrain(train_o, args, train_data);
    if (*eval) return CmdEval(eval_o, args, eval_data, checkpoint, beta, split, match_rate);
    if (*ablate) return CmdAblate(ablate_o, args, ablate_data, sweep, seeds, values);
    if (*grad) return CmdGradcheck(grad_o, args);
    if (*plot) return CmdPlot(plot_o, args, plot_inputs);
  } catch (const UsageError &e) {
    std::fprintf(stderr, "speechground: %s\n", e.what());
    return kExitUsage;
  } catch (const sg::ConfigError &e) {
    std::fprintf(stderr, "speechground: config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "speechground: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
