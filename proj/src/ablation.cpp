// src/ablation.cpp

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

#include "speechground/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "speechground/trainer.hpp"

namespace speechground {

std::string ToString(SweepKind kind) {
  switch (kind) {
    case SweepKind::kModules: return "modules";
    case SweepKind::kAlignment: return "alignment";
    case SweepKind::kBeta: return "beta";
    case SweepKind::kRate: return "rate";
    case SweepKind::kNoise: return "noise";
  }
  return "?";
}

SweepKind SweepKindFromString(const std::string &s) {
  for (SweepKind k : {SweepKind::kModules, SweepKind::kAlignment, SweepKind::kBeta,
                      SweepKind::kRate, SweepKind::kNoise})
    if (ToString(k) == s) return k;
  throw ConfigError("unknown sweep '" + s + "' (expected modules, alignment, beta, rate or noise)");
}

const std::vector<double> &DefaultBetaGrid() {
  static const std::vector<double> grid = {0.0, 0.2, 0.5, 0.8, 1.0};
  return grid;
}

namespace {

std::string Label(const char *prefix, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s=%g", prefix, v);
  return buf;
}

}  // namespace

std::vector<AblationCell> SweepCells(SweepKind kind, const TrainConfig &base,
                                     const std::vector<double> &values) {
  std::vector<AblationCell> cells;
  auto add = [&](std::string name, TrainConfig cfg, double beta) {
    cells.push_back({std::move(name), std::move(cfg), beta});
  };
  switch (kind) {
    case SweepKind::kModules: {
      struct Row {
        const char *name;
        ModuleToggles toggles;
      };
      for (const Row &r : {Row{"baseline", {false, false, false}}, Row{"sll", {true, false, false}},
                           Row{"sll+ccm", {true, false, true}}, Row{"sll+cbm+ccm", {true, true, true}}}) {
        TrainConfig cfg = base;
        cfg.modules = r.toggles;
        add(r.name, cfg, cfg.loss.beta);
      }
      break;
    }
    case SweepKind::kAlignment: {
      struct Row {
        const char *name;
        bool ccm;
        AlignmentSet set;
      };
      for (const Row &r : {Row{"none", false, {true, true, true}},
                           Row{"T&O", true, {true, false, false}},
                           Row{"T&O+T&S", true, {true, false, true}},
                           Row{"T&O+S&O+T&S", true, {true, true, true}}}) {
        TrainConfig cfg = base;
        cfg.modules = {true, true, r.ccm};
        cfg.alignment = r.set;
        add(r.name, cfg, cfg.loss.beta);
      }
      break;
    }
    case SweepKind::kBeta: {
      TrainConfig cfg = base;
      cfg.modules = {true, true, true};
      for (double b : values.empty() ? DefaultBetaGrid() : values) {
        if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("beta grid values must lie in [0, 1]");
        add(Label("beta", b), cfg, b);
      }
      break;
    }
    case SweepKind::kRate: {
      std::vector<double> grid = values.empty() ? std::vector<double>{2.0 / 3.0, 1.0, 4.0 / 3.0} : values;
      for (double r : grid) {
        TrainConfig cfg = base;
        cfg.input.rate_scale = r;
        add(Label("rate", r), cfg, cfg.loss.beta);
      }
      break;
    }
    case SweepKind::kNoise: {
      std::vector<double> grid = values.empty() ? std::vector<double>{0.25, 0.5, 1.0} : values;
      for (double n : grid) {
        TrainConfig cfg = base;
        cfg.input.noise_level = n;
        add(Label("noise", n), cfg, cfg.loss.beta);
      }
      break;
    }
  }
  for (const auto &c : cells) c.cfg.Validate();
  return cells;
}

std::string AblationTable::ToCsv() const {
  std::string out = "cell,seed,subset,thresh,accuracy\n";
  for (const auto &r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%s,%llu,%s,%.2f,%.4f\n", r.cell.c_str(),
                  static_cast<unsigned long long>(r.seed), r.subset.c_str(), r.thresh, r.accuracy);
    out += line;
  }
  return out;
}

std::vector<AblationSummaryRow> AblationTable::Summary() const {
  std::vector<AblationSummaryRow> out;
  std::vector<std::vector<double>> values;
  std::map<std::tuple<std::string, std::string, double>, size_t> index;
  for (const auto &r : rows) {
    auto key = std::make_tuple(r.cell, r.subset, r.thresh);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.cell, r.subset, r.thresh});
      values.emplace_back();
    }
    values[it->second].push_back(r.accuracy);
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const auto &v = values[i];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    out[i].min = *std::min_element(v.begin(), v.end());
    out[i].max = *std::max_element(v.begin(), v.end());
  }
  return out;
}

std::string AblationTable::SummaryCsv() const {
  std::string out = "cell,subset,thresh,mean,std,min,max\n";
  for (const auto &s : Summary()) {
    char line[200];
    std::snprintf(line, sizeof line, "%s,%s,%.2f,%.4f,%.4f,%.4f,%.4f\n", s.cell.c_str(),
                  s.subset.c_str(), s.thresh, s.mean, s.std, s.min, s.max);
    out += line;
  }
  return out;
}

namespace {

void AppendRows(const std::string &cell, uint64_t seed, const Breakdown &b,
                std::vector<AblationRow> &out) {
  auto emit = [&](const char *subset, const std::array<BreakdownCell, 2> &cells) {
    for (int k = 0; k < 2; ++k) out.push_back({cell, seed, subset, kThresholds[k], cells[k].accuracy});
  };
  if (b.unique) emit("unique", *b.unique);
  if (b.multiple) emit("multiple", *b.multiple);
  emit("overall", b.overall);
}

// Runs fn(0..n-1) on up to `threads` workers.
void ParallelFor(int n, int threads, const std::function<void(int)> &fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

AblationTable RunAblation(const TrainConfig &base, const GenConfig &gen, const Dataset &train,
                          const Dataset &val, const AblationSpec &spec,
                          const std::function<void(const std::string &)> &progress) {
  if (spec.seeds.empty()) throw ConfigError("ablation needs at least one seed");
  if (val.utterances.empty()) throw Error("validation set is empty");
  std::vector<AblationCell> cells = SweepCells(spec.kind, base, spec.values);
  std::mutex progress_mutex;
  auto report = [&](const std::string &msg) {
    if (!progress) return;
    std::lock_guard<std::mutex> lock(progress_mutex);
    progress(msg);
  };

  // Cells are grouped by input settings so each sample set is prepared once;
  // beta cells additionally share their training runs.
  std::vector<std::vector<AblationRow>> per_cell_seed(cells.size() * spec.seeds.size());
  size_t start = 0;
  while (start < cells.size()) {
    size_t end = start + 1;
    while (end < cells.size() && cells[end].cfg.input == cells[start].cfg.input) ++end;
    const InputConfig &input = cells[start].cfg.input;
    std::vector<Sample> train_samples = PrepareSamples(train, input, gen, base.train_limit);
    std::vector<Sample> clean_samples;
    if (base.clean_epochs > 0) {
      InputConfig clean = input;
      clean.noise_level = 0.0;
      clean.rate_scale = 1.0;
      clean_samples = PrepareSamples(train, clean, gen, base.train_limit);
    }
    std::vector<Sample> val_samples = PrepareSamples(val, input, gen);
    TrainingData data{&train_samples, base.clean_epochs > 0 ? &clean_samples : nullptr, nullptr};

    const bool shared = spec.kind == SweepKind::kBeta;
    const int groups = shared ? 1 : static_cast<int>(end - start);
    const int jobs = groups * static_cast<int>(spec.seeds.size());
    ParallelFor(jobs, spec.threads, [&](int job) {
      const size_t group = static_cast<size_t>(job) / spec.seeds.size();
      const size_t seed_index = static_cast<size_t>(job) % spec.seeds.size();
      const uint64_t seed = spec.seeds[seed_index];
      TrainConfig cfg = cells[start + group].cfg;
      cfg.seed = seed;
      cfg.eval_every = 0;
      TrainResult result = Train(cfg, data);
      auto scores = Infer(result.model, val_samples);
      const size_t first = start + group, last = shared ? end : first + 1;
      for (size_t c = first; c < last; ++c) {
        Breakdown b = ComputeBreakdown(
            MakeRecords(result.model, scores, val_samples, cells[c].eval_beta));
        AppendRows(cells[c].name, seed, b, per_cell_seed[c * spec.seeds.size() + seed_index]);
        char msg[160];
        std::snprintf(msg, sizeof msg, "%s seed %llu: overall Acc@0.25 %.2f Acc@0.5 %.2f",
                      cells[c].name.c_str(), static_cast<unsigned long long>(seed),
                      b.overall[0].accuracy, b.overall[1].accuracy);
        report(msg);
      }
    });
    start = end;
  }

  AblationTable table;
  for (auto &rows : per_cell_seed)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

int ThreadsFromEnvironment() {
  const char *v = std::getenv("SPEECHGROUND_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  char *end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 64));
}

}  // namespace speechground
