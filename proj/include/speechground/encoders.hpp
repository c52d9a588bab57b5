// include/speechground/encoders.hpp

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

#ifndef SPEECHGROUND_ENCODERS_HPP_
#define SPEECHGROUND_ENCODERS_HPP_

#include <span>
#include <string>
#include <vector>

#include "speechground/autograd.hpp"
#include "speechground/parameters.hpp"
#include "speechground/phonetics.hpp"
#include "speechground/scenegen.hpp"

namespace speechground {

using ag::Tape;
using ag::Var;

/// y = x W + b
struct Linear {
  ag::Parameter *weight = nullptr;
  ag::Parameter *bias = nullptr;

  static Linear Create(ParameterStore &store, const std::string &name, int in, int out, Rng &rng);
  Var operator()(Tape &tape, const Var &x) const;
};

/// Scaled dot-product attention with `heads` column groups and an output
/// projection; queries attend over `context`. No residual.
struct MultiHeadAttention {
  Linear query, key, value, output;
  int heads = 1;

  static MultiHeadAttention Create(ParameterStore &store, const std::string &prefix, int dim,
                                   int heads, Rng &rng);
  Var operator()(Tape &tape, const Var &queries, const Var &context) const;
};

/// Standard sine/cosine position table, n x dim.
Matrix SinusoidalPositions(int n, int dim);

inline constexpr int kFrameStack = 4;

/// Groups of 4 consecutive mel frames flattened into rows of 320
/// (frame-major); the last group is padded by repeating its final frame.
/// Returns ceil(L/4) x 320.
Matrix StackFrames(const MelSpectrogram &mel);

/// Learned linear map from stacked frames to D_s (stand-in for a frozen
/// pretrained speech encoder).
struct SpeechFrontend {
  Linear proj;
  static SpeechFrontend Create(ParameterStore &store, int d_model, Rng &rng);
  Var operator()(Tape &tape, const Matrix &stacked_frames) const;
};

/// W_s' = SelfAttention(Linear(W_s) + positions) with a residual path.
struct PhoneticRefiner {
  Linear proj;
  MultiHeadAttention attention;
  static PhoneticRefiner Create(ParameterStore &store, int d_model, int heads, Rng &rng);
  Var operator()(Tape &tape, const Var &speech_frames) const;
};

struct GlobalSpeechFeature {
  Var pooled;   // 1 x D (F_s)
  Var stacked;  // M x D (F_s')
};

/// Column-wise max over frames, then M stacked copies.
GlobalSpeechFeature PoolAndStack(Tape &tape, const Var &frames, int num_proposals);

/// Linear head D_s -> C followed by softmax.
struct SpeechClassifier {
  Linear head;
  static SpeechClassifier Create(ParameterStore &store, int d_model, int num_classes, Rng &rng);
  Var Logits(Tape &tape, const Var &pooled) const;
  Var operator()(Tape &tape, const Var &pooled) const;
};

struct TextFeatures {
  Var tokens;    // L_t x D
  Var sentence;  // 1 x D, mean over tokens
};

/// Word embeddings + positions followed by one residual self-attention layer.
struct TextEncoder {
  ag::Parameter *embedding = nullptr;
  MultiHeadAttention attention;
  static TextEncoder Create(ParameterStore &store, int vocab_size, int d_model, int heads,
                            Rng &rng);
  /// Throws Error for token ids outside the embedding table.
  TextFeatures operator()(Tape &tape, std::span<const int> token_ids) const;
};

/// Per-box point sets packed for the visual encoder: rows are
/// [x - cx, y - cy, z - cz, aux...] for every point inside a box, grouped
/// by box; offsets has one more entry than there are boxes.
struct BoxPointSets {
  Matrix features;
  std::vector<int> offsets;
  int num_boxes() const { return static_cast<int>(offsets.size()) - 1; }
};

BoxPointSets GatherBoxPoints(const PointCloud &cloud, std::span<const Box3D> boxes);

struct VisualFeatures {
  Var proposals;      // M x D_v
  Var object_anchor;  // 1 x D_v (O)
};

/// Shared per-point linear + GELU, max pooled per box. Boxes without points
/// take the learned empty embedding.
struct VisualEncoder {
  Linear point;
  ag::Parameter *empty = nullptr;
  static VisualEncoder Create(ParameterStore &store, int d_model, Rng &rng);
  Var operator()(Tape &tape, const BoxPointSets &sets) const;
  /// Encodes proposals and target boxes together; the anchor is the mean of
  /// the target-box features.
  VisualFeatures Encode(Tape &tape, const PointCloud &cloud, std::span<const Box3D> proposals,
                        std::span<const Box3D> targets) const;
};

}  // namespace speechground

#endif  // SPEECHGROUND_ENCODERS_HPP_
