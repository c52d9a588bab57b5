// src/model.cpp

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

#include "speechground/model.hpp"

#include <unordered_map>

#include "speechground/phonetics.hpp"
#include "speechground/vocabulary.hpp"

namespace speechground {

uint64_t SpeechSeed(const Utterance &u) { return MixSeed(u.corruption_seed, 1); }
uint64_t ProposalSeed(const Utterance &u) { return MixSeed(u.corruption_seed, 2); }

Sample PrepareSample(const Dataset &dataset, int utterance_index, const PointCloud &cloud,
                     const InputConfig &input) {
  const Utterance &u = dataset.utterances.at(utterance_index);
  Sample s;
  s.utterance_index = utterance_index;
  s.scene_index = dataset.SceneIndex(u.scene_id);
  const Scene &scene = dataset.scenes[s.scene_index];
  const SceneObject &target = scene.Object(u.target_instance_id);

  s.transcript =
      CorruptTranscription(u.tokens, input.error_rate, ConfusionTable::Default(), u.corruption_seed);
  s.text_ids = Vocabulary::Get().Encode(s.transcript);
  MelSpectrogram mel = SynthSpectrogram(UtterancePhonemes(u.tokens), input.rate_scale,
                                        input.noise_level, SpeechSeed(u));
  s.speech_frames = StackFrames(mel);

  s.proposals = ProposeBoxes(scene, u.target_instance_id, input.num_proposals,
                             input.proposal_jitter, ProposalSeed(u));
  s.ground_truth = target.box;
  std::vector<Box3D> boxes = s.proposals.boxes;
  boxes.push_back(target.box);
  s.point_sets = GatherBoxPoints(cloud, boxes);
  s.labels = MakeRefLabels(s.proposals, target.box);
  s.target_class = target.class_id;
  s.subset_tag = u.subset_tag;
  return s;
}

std::vector<Sample> PrepareSamples(const Dataset &dataset, const InputConfig &input,
                                   const GenConfig &gen, int limit) {
  int n = static_cast<int>(dataset.utterances.size());
  if (limit > 0) n = std::min(n, limit);
  std::unordered_map<std::string, int> scene_of;
  for (size_t i = 0; i < dataset.scenes.size(); ++i)
    scene_of[dataset.scenes[i].scene_id] = static_cast<int>(i);
  std::unordered_map<int, PointCloud> clouds;
  std::vector<Sample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto it = scene_of.find(dataset.utterances[i].scene_id);
    if (it == scene_of.end())
      throw Error("utterance " + std::to_string(i) + " names unknown scene '" +
                  dataset.utterances[i].scene_id + "'");
    auto cloud = clouds.find(it->second);
    if (cloud == clouds.end()) {
      const Scene &scene = dataset.scenes[it->second];
      cloud = clouds.emplace(it->second,
                             SamplePoints(scene, input.points_per_scene, scene.point_seed, gen))
                  .first;
    }
    samples.push_back(PrepareSample(dataset, i, cloud->second, input));
  }
  return samples;
}

Model::Model(const ModelConfig &cfg, const ModuleToggles &modules, uint64_t seed)
    : cfg_(cfg), modules_(modules), params_(std::make_unique<ParameterStore>()) {
  Rng rng(MixSeed(seed, 0x6d6f64656c));
  const int d = cfg.d_model;
  const auto &vocab = Vocabulary::Get();
  ParameterStore &p = *params_;
  frontend_ = SpeechFrontend::Create(p, d, rng);
  refiner_ = PhoneticRefiner::Create(p, d, cfg.heads, rng);
  classifier_ = SpeechClassifier::Create(p, d, vocab.num_classes(), rng);
  text_ = TextEncoder::Create(p, vocab.size(), d, cfg.heads, rng);
  visual_ = VisualEncoder::Create(p, d, rng);
  text_matcher_ = CrossModalMatcher::Create(p, "match", d, cfg.heads, cfg.ffn_hidden, rng);
  text_head_ = ScoreHead::Create(p, "text_head", d, cfg.score_hidden, rng);
  speech_head_ = ScoreHead::Create(p, "speech_head", d, cfg.score_hidden, rng);
  // Created last so the other tensors do not depend on this flag.
  speech_matcher_ = cfg.share_matcher ? text_matcher_
                                      : CrossModalMatcher::Create(p, "match_speech", d, cfg.heads,
                                                                  cfg.ffn_hidden, rng);
}

Var Model::EncodeSpeech(Tape &tape, const Matrix &frames) const {
  Var w = frontend_(tape, frames);
  return modules_.sll ? refiner_(tape, w) : w;
}

ForwardOutput Model::Forward(Tape &tape, const Sample &sample, bool need_speech_feature) const {
  ForwardOutput out;
  const int m = sample.proposals.size();
  TextFeatures text = text_(tape, sample.text_ids);
  out.text_feature = text.sentence;
  Var boxes = visual_(tape, sample.point_sets);
  Var proposals = ag::Rows(boxes, 0, m);
  out.object_anchor = ag::MeanRows(ag::Rows(boxes, m, sample.point_sets.num_boxes() - m));

  out.text_logits = text_head_.Logits(tape, text_matcher_(tape, proposals, text.tokens));
  out.text_scores = ag::SoftmaxRows(out.text_logits);

  if (modules_.cbm || need_speech_feature) {
    out.speech_frames = EncodeSpeech(tape, sample.speech_frames);
    out.speech_feature = PoolAndStack(tape, out.speech_frames, m).pooled;
    if (modules_.sll) out.class_probs = classifier_(tape, out.speech_feature);
    if (modules_.cbm) {
      out.speech_logits =
          speech_head_.Logits(tape, speech_matcher_(tape, proposals, out.speech_frames));
      out.speech_scores = ag::SoftmaxRows(out.speech_logits);
    }
  }
  return out;
}

BranchScores Model::Branches(const Sample &sample) const {
  Tape tape(false);
  ForwardOutput f = Forward(tape, sample, false);
  BranchScores b;
  b.text_logits = f.text_logits.value();
  b.text_scores = f.text_scores.value();
  if (f.speech_scores.valid()) {
    b.speech_logits = f.speech_logits.value();
    b.speech_scores = f.speech_scores.value();
  }
  return b;
}

ProposalScores Model::Fuse(const BranchScores &b, double beta) const {
  ProposalScores s;
  s.s_text = b.text_scores;
  if (!modules_.cbm || b.speech_scores.size() == 0) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0, 1]");
    s.fused = b.text_scores;
    return s;
  }
  s.s_speech = b.speech_scores;
  s.fused = cfg_.logit_fusion ? FuseLogits(b.speech_logits, b.text_logits, beta)
                              : FuseScores(b.speech_scores, b.text_scores, beta);
  return s;
}

RowVector Model::SpeechFeature(const Matrix &speech_frames) const {
  Tape tape(false);
  return ag::ColMax(EncodeSpeech(tape, speech_frames)).value();
}

}  // namespace speechground
