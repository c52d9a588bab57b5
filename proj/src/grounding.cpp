// src/grounding.cpp

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

#include "speechground/grounding.hpp"

namespace speechground {

CrossModalMatcher CrossModalMatcher::Create(ParameterStore &store, const std::string &prefix,
                                            int dim, int heads, int hidden, Rng &rng) {
  CrossModalMatcher m;
  m.attention = MultiHeadAttention::Create(store, prefix + ".attn", dim, heads, rng);
  m.ff_in = Linear::Create(store, prefix + ".ff_in", dim, hidden, rng);
  m.ff_out = Linear::Create(store, prefix + ".ff_out", hidden, dim, rng);
  return m;
}

Var CrossModalMatcher::operator()(Tape &tape, const Var &proposals, const Var &language) const {
  if (language.rows() == 0) throw Error("cross_modal_match needs a nonempty language sequence");
  Var x = ag::Add(proposals, attention(tape, proposals, language));
  return ag::Add(x, ff_out(tape, ag::Gelu(ff_in(tape, x))));
}

ScoreHead ScoreHead::Create(ParameterStore &store, const std::string &prefix, int dim, int width,
                            Rng &rng) {
  ScoreHead h;
  h.hidden = Linear::Create(store, prefix + ".hidden", dim, width, rng);
  h.out = Linear::Create(store, prefix + ".out", width, 1, rng);
  return h;
}

Var ScoreHead::Logits(Tape &tape, const Var &fused) const {
  return ag::Transpose(out(tape, ag::Gelu(hidden(tape, fused))));
}

Var ScoreHead::operator()(Tape &tape, const Var &fused) const {
  return ag::SoftmaxRows(Logits(tape, fused));
}

RowVector FuseScores(const RowVector &s_speech, const RowVector &s_text, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0, 1]");
  if (s_speech.size() != s_text.size()) throw Error("score vectors differ in length");
  if (beta == 0.0) return s_text;
  if (beta == 1.0) return s_speech;
  return beta * s_speech + (1.0 - beta) * s_text;
}

RowVector FuseLogits(const RowVector &l_speech, const RowVector &l_text, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0, 1]");
  if (l_speech.size() != l_text.size()) throw Error("logit vectors differ in length");
  RowVector z = beta == 0.0 ? l_text : beta == 1.0 ? l_speech
                                                   : RowVector(beta * l_speech + (1.0 - beta) * l_text);
  RowVector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

int SelectBox(const RowVector &scores) {
  if (scores.size() == 0) throw Error("select_box needs at least one score");
  int best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return best;
}

std::pair<int, Box3D> SelectBox(const RowVector &scores, const ProposalSet &proposals) {
  if (scores.size() != proposals.size()) throw Error("score count differs from proposal count");
  int i = SelectBox(scores);
  return {i, proposals.boxes[i]};
}

}  // namespace speechground
