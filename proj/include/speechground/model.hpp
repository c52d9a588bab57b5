// include/speechground/model.hpp

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

#ifndef SPEECHGROUND_MODEL_HPP_
#define SPEECHGROUND_MODEL_HPP_

#include <memory>
#include <vector>

#include "speechground/config.hpp"
#include "speechground/dataset_io.hpp"
#include "speechground/encoders.hpp"
#include "speechground/grounding.hpp"
#include "speechground/losses.hpp"

namespace speechground {

/// One utterance turned into model inputs. Transcription errors, the
/// spectrogram and the proposals are all derived from the utterance's
/// corruption seed, so preparation is deterministic.
struct Sample {
  int utterance_index = 0;
  int scene_index = 0;
  std::vector<std::string> transcript;  // possibly corrupted
  std::vector<int> text_ids;
  Matrix speech_frames;  // stacked, ceil(L / 4) x 320
  ProposalSet proposals;
  BoxPointSets point_sets;  // proposals first, then the ground-truth box
  RefLabels labels;
  Box3D ground_truth;
  int target_class = 0;
  SubsetTag subset_tag = SubsetTag::kUnique;
};

/// Per-sample seeds derived from the corruption seed.
uint64_t SpeechSeed(const Utterance &u);
uint64_t ProposalSeed(const Utterance &u);

/// Prepares every utterance of the dataset (or the first `limit`, when
/// positive). Throws Error when a scene holds more objects than proposals.
std::vector<Sample> PrepareSamples(const Dataset &dataset, const InputConfig &input,
                                   const GenConfig &gen = {}, int limit = 0);
Sample PrepareSample(const Dataset &dataset, int utterance_index, const PointCloud &cloud,
                     const InputConfig &input);

/// Both branches' raw outputs for one sample; the speech rows are empty when
/// the speech scores are disabled.
struct BranchScores {
  RowVector speech_logits, speech_scores;
  RowVector text_logits, text_scores;
};

struct ForwardOutput {
  Var speech_frames;   // W_s' (or W_s without refinement)
  Var speech_feature;  // F_s, 1 x D
  Var class_probs;     // 1 x C; invalid without refinement
  Var text_feature;    // F_t, 1 x D
  Var object_anchor;   // O, 1 x D
  Var speech_logits, speech_scores;  // 1 x M; invalid when cbm is off
  Var text_logits, text_scores;      // 1 x M
};

/// The full grounder. All parameters are created in a fixed order whatever
/// the module toggles, so configurations that share a seed start from the
/// same weights.
class Model {
 public:
  Model(const ModelConfig &cfg, const ModuleToggles &modules, uint64_t seed);

  /// Runs the branches enabled by the toggles; with `need_speech_feature`
  /// the speech encoder runs even when only its pooled feature is wanted.
  ForwardOutput Forward(Tape &tape, const Sample &sample, bool need_speech_feature) const;

  /// Inference without gradients.
  BranchScores Branches(const Sample &sample) const;
  /// Fused scores at the given beta, respecting the fusion mode. With cbm
  /// off beta is ignored and the text scores are returned unchanged.
  ProposalScores Fuse(const BranchScores &branches, double beta) const;
  ProposalScores Score(const Sample &sample, double beta) const {
    return Fuse(Branches(sample), beta);
  }

  /// Pooled speech feature only (no proposals involved).
  RowVector SpeechFeature(const Matrix &speech_frames) const;

  ParameterStore &params() { return *params_; }
  const ParameterStore &params() const { return *params_; }
  const ModelConfig &config() const { return cfg_; }
  const ModuleToggles &modules() const { return modules_; }

 private:
  Var EncodeSpeech(Tape &tape, const Matrix &frames) const;

  ModelConfig cfg_;
  ModuleToggles modules_;
  std::unique_ptr<ParameterStore> params_;
  SpeechFrontend frontend_;
  PhoneticRefiner refiner_;
  SpeechClassifier classifier_;
  TextEncoder text_;
  VisualEncoder visual_;
  CrossModalMatcher text_matcher_, speech_matcher_;
  ScoreHead text_head_, speech_head_;
};

}  // namespace speechground

#endif  // SPEECHGROUND_MODEL_HPP_
