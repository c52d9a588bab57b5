// src/evalmetrics.cpp

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

#include "speechground/evalmetrics.hpp"

#include <cstdio>
#include <fstream>

namespace speechground {

double AccAtIou(std::span<const EvalRecord> records, double threshold) {
  if (records.empty()) throw Error("acc_at_iou needs at least one record");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("IoU threshold must lie in (0, 1)");
  int hits = 0;
  for (const auto &r : records)
    if (Iou(r.predicted, r.ground_truth) > threshold) ++hits;
  return 100.0 * hits / static_cast<double>(records.size());
}

double MatchRate(std::span<const EvalRecord> records) {
  if (records.empty()) throw Error("match rate needs at least one record");
  int hits = 0;
  for (const auto &r : records)
    if (r.predicted_index >= 0 && r.predicted_index == r.target_index) ++hits;
  return 100.0 * hits / static_cast<double>(records.size());
}

namespace {

std::array<BreakdownCell, 2> Cells(std::span<const EvalRecord> records) {
  std::array<BreakdownCell, 2> cells;
  for (int k = 0; k < 2; ++k)
    cells[k] = {AccAtIou(records, kThresholds[k]), static_cast<int>(records.size())};
  return cells;
}

}  // namespace

Breakdown ComputeBreakdown(std::span<const EvalRecord> records) {
  if (records.empty()) throw Error("breakdown needs at least one record");
  std::vector<EvalRecord> unique, multiple;
  for (const auto &r : records) (r.subset_tag == SubsetTag::kUnique ? unique : multiple).push_back(r);
  Breakdown b;
  if (!unique.empty()) b.unique = Cells(unique);
  if (!multiple.empty()) b.multiple = Cells(multiple);
  b.overall = Cells(records);
  return b;
}

std::string BreakdownCsv(const Breakdown &b) {
  std::string out = "subset,thresh,accuracy,n\n";
  auto emit = [&](const char *name, const std::array<BreakdownCell, 2> &cells) {
    for (int k = 0; k < 2; ++k) {
      char line[96];
      std::snprintf(line, sizeof line, "%s,%.2f,%.4f,%d\n", name, kThresholds[k],
                    cells[k].accuracy, cells[k].n);
      out += line;
    }
  };
  if (b.unique) emit("unique", *b.unique);
  if (b.multiple) emit("multiple", *b.multiple);
  emit("overall", b.overall);
  return out;
}

void WriteBreakdownCsv(const Breakdown &b, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << BreakdownCsv(b);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace speechground
