// include/speechground/evalmetrics.hpp

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

#ifndef SPEECHGROUND_EVALMETRICS_HPP_
#define SPEECHGROUND_EVALMETRICS_HPP_

#include <filesystem>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speechground/scenegen.hpp"

namespace speechground {

struct EvalRecord {
  Box3D predicted;
  Box3D ground_truth;
  SubsetTag subset_tag = SubsetTag::kUnique;
  // For the match-rate metric; -1 when unknown.
  int predicted_index = -1;
  int target_index = -1;
};

inline constexpr double kThresholds[] = {0.25, 0.5};

/// Percentage of records whose IoU strictly exceeds the threshold. Throws
/// Error on empty input or a threshold outside (0, 1).
double AccAtIou(std::span<const EvalRecord> records, double threshold);

/// Percentage of records whose predicted proposal index equals the target
/// index. Throws Error on empty input.
double MatchRate(std::span<const EvalRecord> records);

struct BreakdownCell {
  double accuracy = 0.0;
  int n = 0;
  bool operator==(const BreakdownCell &) const = default;
};

/// Accuracy per subset and threshold; subsets without records are absent.
struct Breakdown {
  // Index 0 is Acc@0.25, index 1 Acc@0.5.
  std::optional<std::array<BreakdownCell, 2>> unique, multiple;
  std::array<BreakdownCell, 2> overall;
  bool operator==(const Breakdown &) const = default;
};

/// Throws Error on empty input.
Breakdown ComputeBreakdown(std::span<const EvalRecord> records);

/// CSV with header `subset,thresh,accuracy,n`; absent subsets are omitted.
std::string BreakdownCsv(const Breakdown &b);
void WriteBreakdownCsv(const Breakdown &b, const std::filesystem::path &path);

}  // namespace speechground

#endif  // SPEECHGROUND_EVALMETRICS_HPP_
