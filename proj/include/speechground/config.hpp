// include/speechground/config.hpp

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

#ifndef SPEECHGROUND_CONFIG_HPP_
#define SPEECHGROUND_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speechground/dataset_io.hpp"
#include "speechground/losses.hpp"
#include "speechground/scenegen.hpp"

namespace speechground {

struct ModelConfig {
  int d_model = 64;
  int heads = 4;
  int ffn_hidden = 128;
  int score_hidden = 64;
  // One cross-modal matcher serves both branches; false gives each branch
  // its own copy.
  bool share_matcher = true;
  bool logit_fusion = false;
  bool operator==(const ModelConfig &) const = default;
};

struct ModuleToggles {
  bool sll = true;  // phonetic refinement + speech classification loss
  bool cbm = true;  // speech scores and beta fusion
  bool ccm = true;  // contrastive alignment
  bool speech_branch() const { return sll || cbm || ccm; }
  bool operator==(const ModuleToggles &) const = default;
};

/// How utterances become model inputs.
struct InputConfig {
  int num_proposals = 16;
  double proposal_jitter = 0.15;
  int points_per_scene = 1024;
  double error_rate = 0.3;
  double rate_scale = 1.0;
  double noise_level = 0.5;
  bool operator==(const InputConfig &) const = default;
};

struct TrainConfig {
  uint64_t seed = 1;
  int epochs = 40;
  int batch_size = 8;
  double learning_rate = 1e-3;
  // Stop after this many optimizer steps; 0 means no limit.
  int max_steps = 0;
  // Train on the first n training utterances only; 0 means all.
  int train_limit = 0;
  // Validation every k epochs (the final epoch is always evaluated); 0
  // disables per-epoch validation.
  int eval_every = 1;
  // Two-phase schedule: the first clean_epochs use noise_level 0 and
  // rate_scale 1, the rest use the configured perturbation.
  int clean_epochs = 0;
  bool calibrate_gammas = false;
  LossConfig loss;
  ModuleToggles modules;
  AlignmentSet alignment;
  ModelConfig model;
  InputConfig input;
  bool operator==(const TrainConfig &) const = default;

  /// Throws ConfigError describing the first inconsistent field.
  void Validate() const;
};

/// Everything a command can read from a config file.
struct Config {
  TrainConfig train;
  GenConfig gen;
  int scenes = 400;
  int val_scenes = 250;
  int utterances_per_scene = 6;
  int val_utterances_per_scene = 8;
  std::string data_dir = "data_out";
  int gradcheck_samples = 4;
  int gradcheck_proposals = 8;
  int gradcheck_entries = 32;
  double gradcheck_epsilon = 1e-5;
  bool operator==(const Config &) const = default;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys and
/// unparsable values raise ConfigError naming the key.
Config ParseConfig(const std::string &text, const std::string &source = "<config>");
Config LoadConfig(const std::filesystem::path &path);
/// Applies one assignment in place.
void SetConfigValue(Config &cfg, const std::string &key, const std::string &value);
std::string GetConfigValue(const Config &cfg, const std::string &key);
/// Every key with its resolved value, one per line, in a fixed order.
std::string ConfigToText(const Config &cfg);

struct ConfigKeyInfo {
  std::string key;
  std::string doc;
};
const std::vector<ConfigKeyInfo> &ConfigKeys();

}  // namespace speechground

#endif  // SPEECHGROUND_CONFIG_HPP_
