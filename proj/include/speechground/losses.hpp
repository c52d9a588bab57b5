// include/speechground/losses.hpp

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

#ifndef SPEECHGROUND_LOSSES_HPP_
#define SPEECHGROUND_LOSSES_HPP_

#include <vector>

#include "speechground/autograd.hpp"
#include "speechground/scenegen.hpp"

namespace speechground {

using ag::Var;

inline constexpr double kLogClamp = 1e-12;

/// One-hot proposal labels; the hot entry is the proposal with the highest
/// IoU against the ground truth, lowest index on ties.
struct RefLabels {
  std::vector<double> t;
  int hot = 0;
  RowVector AsRow() const;
};

/// Throws Error on an empty proposal set.
RefLabels MakeRefLabels(const ProposalSet &proposals, const Box3D &gt);

enum class ContrastiveMode { kSixTerm, kFourGroup };

/// Which modality pairs enter the contrastive loss (both directions each).
struct AlignmentSet {
  bool text_object = true;
  bool speech_object = true;
  bool text_speech = true;
  bool any() const { return text_object || speech_object || text_speech; }
  bool operator==(const AlignmentSet &) const = default;
};

struct LossConfig {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double beta = 0.5;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double gamma3 = 1.0;
  double temperature = 0.07;
  ContrastiveMode contrastive_mode = ContrastiveMode::kSixTerm;
  /// Throws ConfigError on a non-positive temperature or non-finite weights.
  void Validate() const;
  bool operator==(const LossConfig &) const = default;
};

/// -sum_i y_i log(max(p_i, 1e-12)) for 1 x C probabilities and targets.
Var ClsLoss(const Var &probs, const Matrix &one_hot);
Var ClsLoss(const Var &probs, int target_class);

/// Cross-entropy of one 1 x M score row against the labels.
Var ReferenceCrossEntropy(const Var &scores, const RefLabels &labels);

/// alpha1 * CE(s_speech) + alpha2 * CE(s_text). An invalid s_speech (speech
/// branch bypassed) contributes nothing.
Var RefLoss(const Var &s_speech, const Var &s_text, const RefLabels &labels, double alpha1,
            double alpha2);

/// Mean over rows i of -log softmax_j(cos(A_i, B_j) / tau)[i]. Throws Error
/// on a zero row or mismatched shapes.
Var ContrastiveDirectional(const Var &a, const Var &b, double temperature);

/// Mean of the active directional terms among T->S, S->T, S->O, O->S, T->O
/// and O->T. In four-group mode the S,T->O and O->S,T pairs are summed
/// first, and the mean is over the resulting groups. Returns an invalid Var
/// when no alignment is active.
Var ContrastiveTotal(const Var &speech, const Var &text, const Var &object, double temperature,
                     const AlignmentSet &alignment = {},
                     ContrastiveMode mode = ContrastiveMode::kSixTerm);

/// gamma1 * contrastive + gamma2 * ref + gamma3 * cls; invalid parts are
/// treated as absent. At least one part must be valid.
Var TotalLoss(const Var &cls, const Var &ref, const Var &contrastive, const LossConfig &cfg);

}  // namespace speechground

#endif  // SPEECHGROUND_LOSSES_HPP_
