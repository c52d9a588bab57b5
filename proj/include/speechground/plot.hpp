// include/speechground/plot.hpp

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

#ifndef SPEECHGROUND_PLOT_HPP_
#define SPEECHGROUND_PLOT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "speechground/common.hpp"

namespace speechground {

/// One plotted value; `value` keeps the input text so the emitted data file
/// repeats the input numbers exactly.
struct ChartPoint {
  std::string cell;
  std::string subset;
  std::string thresh;
  std::string value;
};

struct LossPoint {
  int epoch = 0;
  double total = 0.0, contrastive = 0.0, ref = 0.0, cls = 0.0;
};

/// Reads an ablation summary (`cell,subset,thresh,mean,...`) or a raw
/// ablation table (`cell,seed,subset,thresh,accuracy`, averaged over
/// seeds). Throws ParseError on malformed or empty input.
std::vector<ChartPoint> ReadAblationResults(const std::filesystem::path &path);

/// Reads the per-epoch records of a run log. Throws ParseError on malformed
/// or empty input.
std::vector<LossPoint> ReadRunLog(const std::filesystem::path &path);

/// Overall accuracy against beta, one polyline per threshold. Cells must be
/// named `beta=<value>`.
std::string BetaSweepSvg(const std::vector<ChartPoint> &points);
/// Grouped bars of overall accuracy per cell and threshold.
std::string ModuleBarsSvg(const std::vector<ChartPoint> &points);
/// Loss components against epoch.
std::string LossCurveSvg(const std::vector<LossPoint> &points);

std::string ChartPointsCsv(const std::vector<ChartPoint> &points);
std::string LossPointsCsv(const std::vector<LossPoint> &points);

/// Writes `<stem>.svg` and `<stem>.csv` under `out_dir` for one input file,
/// choosing the chart by content: run logs give loss curves, beta cells a
/// sweep curve, anything else bars. Nothing is written when the input is
/// rejected. Returns the written paths.
std::vector<std::filesystem::path> PlotFile(const std::filesystem::path &input,
                                            const std::filesystem::path &out_dir);

}  // namespace speechground

#endif  // SPEECHGROUND_PLOT_HPP_
