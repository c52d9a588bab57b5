// include/speechground/grounding.hpp

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

#ifndef SPEECHGROUND_GROUNDING_HPP_
#define SPEECHGROUND_GROUNDING_HPP_

#include <span>
#include <string>
#include <utility>

#include "speechground/encoders.hpp"

namespace speechground {

/// Proposals (queries) attend over a language sequence, followed by a
/// residual feed-forward block. M rows in, M rows out.
struct CrossModalMatcher {
  MultiHeadAttention attention;
  Linear ff_in, ff_out;

  static CrossModalMatcher Create(ParameterStore &store, const std::string &prefix, int dim,
                                  int heads, int hidden, Rng &rng);
  /// Throws Error on an empty language sequence.
  Var operator()(Tape &tape, const Var &proposals, const Var &language) const;
};

/// Two-layer feed-forward to one logit per proposal.
struct ScoreHead {
  Linear hidden, out;

  static ScoreHead Create(ParameterStore &store, const std::string &prefix, int dim, int width,
                          Rng &rng);
  /// 1 x M logits.
  Var Logits(Tape &tape, const Var &fused) const;
  /// 1 x M probabilities over the proposals.
  Var operator()(Tape &tape, const Var &fused) const;
};

struct ProposalScores {
  RowVector s_speech;
  RowVector s_text;
  RowVector fused;
};

/// beta * s_speech + (1 - beta) * s_text. Throws Error when beta is outside
/// [0, 1] or the lengths differ.
RowVector FuseScores(const RowVector &s_speech, const RowVector &s_text, double beta);

/// softmax(beta * l_speech + (1 - beta) * l_text); the logit-level variant.
RowVector FuseLogits(const RowVector &l_speech, const RowVector &l_text, double beta);

/// Argmax with ties going to the lowest index. Throws Error on empty input.
int SelectBox(const RowVector &scores);
std::pair<int, Box3D> SelectBox(const RowVector &scores, const ProposalSet &proposals);

}  // namespace speechground

#endif  // SPEECHGROUND_GROUNDING_HPP_
