// include/speechground/dataset_io.hpp

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

#ifndef SPEECHGROUND_DATASET_IO_HPP_
#define SPEECHGROUND_DATASET_IO_HPP_

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "speechground/scenegen.hpp"

namespace speechground {

struct Dataset {
  std::vector<Scene> scenes;
  std::vector<Utterance> utterances;

  /// Index of the scene with the given id; throws Error when missing.
  int SceneIndex(const std::string &scene_id) const;
  bool operator==(const Dataset &) const = default;
};

inline constexpr const char *kScenesFile = "scenes.jsonl";
inline constexpr const char *kUtterancesFile = "utterances.jsonl";

/// Writes `dir/scenes.jsonl` and `dir/utterances.jsonl`, one record per line.
void SaveDataset(const Dataset &dataset, const std::filesystem::path &dir);
/// Throws ParseError naming the file and line on malformed input.
Dataset LoadDataset(const std::filesystem::path &dir);

struct DatasetSpec {
  int num_scenes = 200;
  int utterances_per_scene = 8;
  uint64_t seed = 1;
  std::string id_prefix = "scene";
};

/// Scenes are seeded independently from (seed, index); targets are drawn
/// uniformly from each scene's objects.
Dataset GenerateDataset(const DatasetSpec &spec, const GenConfig &cfg);

struct SubsetCounts {
  int unique = 0;
  int multiple = 0;
  double unique_fraction() const {
    int n = unique + multiple;
    return n == 0 ? 0.0 : static_cast<double>(unique) / n;
  }
};

SubsetCounts CountSubsets(const Dataset &dataset);

}  // namespace speechground

#endif  // SPEECHGROUND_DATASET_IO_HPP_
