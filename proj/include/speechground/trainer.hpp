// include/speechground/trainer.hpp

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

#ifndef SPEECHGROUND_TRAINER_HPP_
#define SPEECHGROUND_TRAINER_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speechground/config.hpp"
#include "speechground/evalmetrics.hpp"
#include "speechground/model.hpp"

namespace speechground {

class TrainingError : public Error {
 public:
  using Error::Error;
};

struct BatchLoss {
  Var total;
  // Components before the gamma weights; invalid when switched off.
  Var contrastive, ref, cls;
};

/// Total loss of one minibatch under the module toggles: ref and cls are
/// averaged over the batch, the contrastive term runs over the batch's
/// F_s / F_t / O rows.
BatchLoss ComputeBatchLoss(Tape &tape, const Model &model, std::span<const Sample *const> batch,
                           const TrainConfig &cfg, const LossConfig &loss);

struct EpochLog {
  int epoch = 0;
  int steps = 0;
  double total = 0.0;
  double contrastive = 0.0;
  double ref = 0.0;
  double cls = 0.0;
  std::optional<Breakdown> validation;
  bool operator==(const EpochLog &) const = default;
};

struct RunLog {
  std::vector<EpochLog> epochs;
  LossConfig effective_loss;
  std::string checkpoint;
  /// One JSON object per epoch, then a closing record with the effective
  /// loss weights and the checkpoint name.
  std::string ToJsonl() const;
  void Write(const std::filesystem::path &path) const;
};

struct TrainingData {
  const std::vector<Sample> *train = nullptr;
  // Unperturbed copy of the training samples for the clean phase of the
  // two-phase schedule; may be null when clean_epochs is 0.
  const std::vector<Sample> *clean_train = nullptr;
  // Validation samples; may be null.
  const std::vector<Sample> *val = nullptr;
};

struct TrainResult {
  Model model;
  RunLog log;
};

/// Deterministic Adam training. Throws TrainingError naming the epoch and
/// batch when a loss turns non-finite.
TrainResult Train(const TrainConfig &cfg, const TrainingData &data,
                  const std::function<void(const EpochLog &)> &on_epoch = {});

/// Restores a model saved by Train; throws Error on shape mismatch.
Model LoadModel(const TrainConfig &cfg, const std::filesystem::path &checkpoint);

/// Inference for every sample (no gradients).
std::vector<BranchScores> Infer(const Model &model, std::span<const Sample> samples);

/// Predictions at the given beta; throws Error on an empty sample set.
std::vector<EvalRecord> MakeRecords(const Model &model, std::span<const BranchScores> scores,
                                    std::span<const Sample> samples, double beta);
Breakdown Evaluate(const Model &model, std::span<const Sample> samples, double beta);
/// Selected proposal per sample.
std::vector<int> Selections(const Model &model, std::span<const Sample> samples, double beta);

struct GradCheckGroup {
  std::string name;
  double rel_error = 0.0;
  int entries = 0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double max_rel_error = 0.0;
  std::string worst;
};

/// Norms below this are treated as this value when forming the relative
/// error ||analytic - numeric|| / max(||analytic||, ||numeric||).
inline constexpr double kGradNormFloor = 1e-5;

/// Central-difference check of every tensor in the store (or of
/// `max_entries` entries per tensor, drawn from `seed`, when positive).
GradCheckReport GradCheck(ParameterStore &store, const std::function<Var(Tape &)> &loss,
                          double epsilon, int max_entries = 0, uint64_t seed = 0);

/// Gradient check of the total training loss on the given batch.
GradCheckReport GradCheckModel(const TrainConfig &cfg, std::span<const Sample> batch,
                               double epsilon, int max_entries = 0);

}  // namespace speechground

#endif  // SPEECHGROUND_TRAINER_HPP_
