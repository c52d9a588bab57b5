// src/encoders.cpp

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

#include "speechground/encoders.hpp"

#include <cmath>

namespace speechground {

Linear Linear::Create(ParameterStore &store, const std::string &name, int in, int out, Rng &rng) {
  Linear l;
  l.weight = &store.AddXavier(name + ".weight", in, out, rng);
  l.bias = &store.AddZeros(name + ".bias", 1, out);
  return l;
}

Var Linear::operator()(Tape &tape, const Var &x) const {
  return ag::AddRow(ag::MatMul(x, tape.Param(*weight)), tape.Param(*bias));
}

MultiHeadAttention MultiHeadAttention::Create(ParameterStore &store, const std::string &prefix,
                                              int dim, int heads, Rng &rng) {
  if (heads < 1 || dim % heads != 0) throw Error("attention width must divide into heads");
  MultiHeadAttention m;
  m.heads = heads;
  m.query = Linear::Create(store, prefix + ".query", dim, dim, rng);
  m.key = Linear::Create(store, prefix + ".key", dim, dim, rng);
  m.value = Linear::Create(store, prefix + ".value", dim, dim, rng);
  m.output = Linear::Create(store, prefix + ".output", dim, dim, rng);
  return m;
}

Var MultiHeadAttention::operator()(Tape &tape, const Var &queries, const Var &context) const {
  Var q = query(tape, queries);
  Var k = key(tape, context);
  Var v = value(tape, context);
  const int dim = static_cast<int>(q.cols());
  const int width = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(width));
  std::vector<Var> per_head;
  per_head.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Var qh = ag::Cols(q, h * width, width);
    Var kh = ag::Cols(k, h * width, width);
    Var vh = ag::Cols(v, h * width, width);
    Var weights = ag::SoftmaxRows(ag::Scale(ag::MatMulNT(qh, kh), scale));
    per_head.push_back(ag::MatMul(weights, vh));
  }
  Var joined = heads == 1 ? per_head[0] : ag::ConcatCols(per_head);
  return output(tape, joined);
}

Matrix SinusoidalPositions(int n, int dim) {
  Matrix p(n, dim);
  for (int pos = 0; pos < n; ++pos) {
    for (int i = 0; i < dim; ++i) {
      double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      p(pos, i) = (i % 2 == 0) ? std::sin(pos * rate) : std::cos(pos * rate);
    }
  }
  return p;
}

Matrix StackFrames(const MelSpectrogram &mel) {
  const int frames = mel.num_frames();
  const int channels = static_cast<int>(mel.bins.rows());
  if (frames == 0) throw Error("empty spectrogram");
  const int groups = (frames + kFrameStack - 1) / kFrameStack;
  Matrix out(groups, kFrameStack * channels);
  for (int g = 0; g < groups; ++g) {
    for (int k = 0; k < kFrameStack; ++k) {
      int f = std::min(g * kFrameStack + k, frames - 1);
      out.block(g, k * channels, 1, channels) = mel.bins.col(f).transpose();
    }
  }
  return out;
}

SpeechFrontend SpeechFrontend::Create(ParameterStore &store, int d_model, Rng &rng) {
  return {Linear::Create(store, "frontend.proj", kFrameStack * kMelChannels, d_model, rng)};
}

Var SpeechFrontend::operator()(Tape &tape, const Matrix &stacked_frames) const {
  return proj(tape, tape.Constant(stacked_frames));
}

PhoneticRefiner PhoneticRefiner::Create(ParameterStore &store, int d_model, int heads, Rng &rng) {
  PhoneticRefiner r;
  r.proj = Linear::Create(store, "refine.proj", d_model, d_model, rng);
  r.attention = MultiHeadAttention::Create(store, "refine.attn", d_model, heads, rng);
  return r;
}

Var PhoneticRefiner::operator()(Tape &tape, const Var &speech_frames) const {
  const int n = static_cast<int>(speech_frames.rows());
  const int d = static_cast<int>(speech_frames.cols());
  Var x = ag::Add(proj(tape, speech_frames), tape.Constant(SinusoidalPositions(n, d)));
  return ag::Add(x, attention(tape, x, x));
}

GlobalSpeechFeature PoolAndStack(Tape &, const Var &frames, int num_proposals) {
  if (num_proposals < 1) throw Error("pool_and_stack needs M >= 1");
  Var pooled = ag::ColMax(frames);
  return {pooled, ag::RepeatRows(pooled, num_proposals)};
}

SpeechClassifier SpeechClassifier::Create(ParameterStore &store, int d_model, int num_classes,
                                          Rng &rng) {
  return {Linear::Create(store, "speech_cls.head", d_model, num_classes, rng)};
}

Var SpeechClassifier::Logits(Tape &tape, const Var &pooled) const { return head(tape, pooled); }

Var SpeechClassifier::operator()(Tape &tape, const Var &pooled) const {
  return ag::SoftmaxRows(Logits(tape, pooled));
}

TextEncoder TextEncoder::Create(ParameterStore &store, int vocab_size, int d_model, int heads,
                                Rng &rng) {
  TextEncoder t;
  Matrix emb(vocab_size, d_model);
  const double a = std::sqrt(3.0);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = Uniform(rng, -a, a);
  t.embedding = &store.Add("text.embedding", std::move(emb));
  t.attention = MultiHeadAttention::Create(store, "text.attn", d_model, heads, rng);
  return t;
}

TextFeatures TextEncoder::operator()(Tape &tape, std::span<const int> token_ids) const {
  if (token_ids.empty()) throw Error("encode_text needs at least one token");
  for (int id : token_ids)
    if (id < 0 || id >= embedding->value.rows())
      throw Error("out-of-vocabulary token id " + std::to_string(id));
  const int n = static_cast<int>(token_ids.size());
  const int d = static_cast<int>(embedding->value.cols());
  Var x = ag::Add(ag::GatherRows(tape.Param(*embedding), token_ids),
                  tape.Constant(SinusoidalPositions(n, d)));
  Var h = ag::Add(x, attention(tape, x, x));
  return {h, ag::MeanRows(h)};
}

BoxPointSets GatherBoxPoints(const PointCloud &cloud, std::span<const Box3D> boxes) {
  const Matrix &pts = cloud.points;
  const int channels = static_cast<int>(pts.cols());
  std::vector<int> members;
  BoxPointSets sets;
  sets.offsets.push_back(0);
  std::vector<std::vector<int>> per_box(boxes.size());
  size_t total = 0;
  for (size_t b = 0; b < boxes.size(); ++b) {
    Vector3 lo = boxes[b].min_corner(), hi = boxes[b].max_corner();
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (pts(i, 0) >= lo[0] && pts(i, 0) <= hi[0] && pts(i, 1) >= lo[1] && pts(i, 1) <= hi[1] &&
          pts(i, 2) >= lo[2] && pts(i, 2) <= hi[2])
        per_box[b].push_back(static_cast<int>(i));
    }
    total += per_box[b].size();
    sets.offsets.push_back(static_cast<int>(total));
  }
  sets.features.resize(static_cast<Eigen::Index>(total), channels);
  Eigen::Index row = 0;
  for (size_t b = 0; b < boxes.size(); ++b) {
    for (int i : per_box[b]) {
      sets.features.row(row) = pts.row(i);
      sets.features.block(row, 0, 1, 3) -= boxes[b].center.transpose();
      ++row;
    }
  }
  return sets;
}

VisualEncoder VisualEncoder::Create(ParameterStore &store, int d_model, Rng &rng) {
  VisualEncoder v;
  v.point = Linear::Create(store, "visual.point", 3 + kAuxChannels, d_model, rng);
  v.empty = &store.AddZeros("visual.empty", 1, d_model);
  return v;
}

Var VisualEncoder::operator()(Tape &tape, const BoxPointSets &sets) const {
  Var fallback = tape.Param(*empty);
  if (sets.features.rows() == 0) {
    return ag::RepeatRows(fallback, sets.num_boxes());
  }
  Var per_point = ag::Gelu(point(tape, tape.Constant(sets.features)));
  return ag::SegmentMax(per_point, sets.offsets, fallback);
}

VisualFeatures VisualEncoder::Encode(Tape &tape, const PointCloud &cloud,
                                     std::span<const Box3D> proposals,
                                     std::span<const Box3D> targets) const {
  if (targets.empty()) throw Error("encode_visual needs at least one target box");
  std::vector<Box3D> all(proposals.begin(), proposals.end());
  all.insert(all.end(), targets.begin(), targets.end());
  Var feats = (*this)(tape, GatherBoxPoints(cloud, all));
  const int m = static_cast<int>(proposals.size());
  Var anchor = ag::MeanRows(ag::Rows(feats, m, static_cast<int>(targets.size())));
  return {ag::Rows(feats, 0, m), anchor};
}

}  // namespace speechground
