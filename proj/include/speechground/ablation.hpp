// include/speechground/ablation.hpp

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

#ifndef SPEECHGROUND_ABLATION_HPP_
#define SPEECHGROUND_ABLATION_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "speechground/config.hpp"
#include "speechground/dataset_io.hpp"

namespace speechground {

enum class SweepKind { kModules, kAlignment, kBeta, kRate, kNoise };

std::string ToString(SweepKind kind);
/// Accepts modules, alignment, beta, rate and noise.
SweepKind SweepKindFromString(const std::string &s);

/// One trained configuration of a sweep. Beta cells share a training run
/// and differ only in the beta used at evaluation.
struct AblationCell {
  std::string name;
  TrainConfig cfg;
  double eval_beta = 0.5;
};

/// The default beta grid {0, 0.2, 0.5, 0.8, 1}.
const std::vector<double> &DefaultBetaGrid();

/// Cells of a sweep built on `base`. `values` overrides the beta, rate or
/// noise grid; it is ignored for module and alignment sweeps.
std::vector<AblationCell> SweepCells(SweepKind kind, const TrainConfig &base,
                                     const std::vector<double> &values = {});

struct AblationSpec {
  SweepKind kind = SweepKind::kModules;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<double> values;
  int threads = 1;
};

struct AblationRow {
  std::string cell;
  uint64_t seed = 0;
  std::string subset;
  double thresh = 0.0;
  double accuracy = 0.0;
};

struct AblationSummaryRow {
  std::string cell;
  std::string subset;
  double thresh = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single seed
  double min = 0.0;
  double max = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;
  /// `cell,seed,subset,thresh,accuracy`
  std::string ToCsv() const;
  /// Mean and spread over seeds, in first-appearance order of the cells.
  std::vector<AblationSummaryRow> Summary() const;
  /// `cell,subset,thresh,mean,std,min,max`
  std::string SummaryCsv() const;
};

/// Trains and evaluates every cell for every seed; jobs run on up to
/// `spec.threads` threads and the table order does not depend on it.
AblationTable RunAblation(const TrainConfig &base, const GenConfig &gen, const Dataset &train,
                          const Dataset &val, const AblationSpec &spec,
                          const std::function<void(const std::string &)> &progress = {});

/// Worker count from $SPEECHGROUND_THREADS (default 1, at least 1).
int ThreadsFromEnvironment();

}  // namespace speechground

#endif  // SPEECHGROUND_ABLATION_HPP_
