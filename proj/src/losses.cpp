// src/losses.cpp

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

#include "speechground/losses.hpp"

#include <cmath>

namespace speechground {

RowVector RefLabels::AsRow() const {
  RowVector r(static_cast<Eigen::Index>(t.size()));
  for (size_t i = 0; i < t.size(); ++i) r[static_cast<Eigen::Index>(i)] = t[i];
  return r;
}

RefLabels MakeRefLabels(const ProposalSet &proposals, const Box3D &gt) {
  if (proposals.boxes.empty()) throw Error("make_ref_labels needs at least one proposal");
  RefLabels labels;
  double best = -1.0;
  for (int i = 0; i < proposals.size(); ++i) {
    double iou = Iou(proposals.boxes[i], gt);
    if (iou > best) {
      best = iou;
      labels.hot = i;
    }
  }
  labels.t.assign(proposals.boxes.size(), 0.0);
  labels.t[labels.hot] = 1.0;
  return labels;
}

void LossConfig::Validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw ConfigError("temperature must be positive");
  for (double w : {alpha1, alpha2, gamma1, gamma2, gamma3})
    if (!std::isfinite(w)) throw ConfigError("loss weights must be finite");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
}

Var ClsLoss(const Var &probs, const Matrix &one_hot) {
  if (probs.rows() != 1 || one_hot.rows() != 1 || probs.cols() != one_hot.cols())
    throw Error("cls_loss expects matching 1 x C rows");
  Var log_p = ag::LogClamped(probs, kLogClamp);
  return ag::Scale(ag::MatMulNT(log_p, probs.tape()->Constant(one_hot)), -1.0);
}

Var ClsLoss(const Var &probs, int target_class) {
  if (target_class < 0 || target_class >= probs.cols()) throw Error("class index out of range");
  Matrix y = Matrix::Zero(1, probs.cols());
  y(0, target_class) = 1.0;
  return ClsLoss(probs, y);
}

Var ReferenceCrossEntropy(const Var &scores, const RefLabels &labels) {
  if (scores.cols() != static_cast<Eigen::Index>(labels.t.size()))
    throw Error("score count differs from label count");
  return ClsLoss(scores, Matrix(labels.AsRow()));
}

Var RefLoss(const Var &s_speech, const Var &s_text, const RefLabels &labels, double alpha1,
            double alpha2) {
  Var text = ag::Scale(ReferenceCrossEntropy(s_text, labels), alpha2);
  if (!s_speech.valid()) return text;
  return ag::Add(ag::Scale(ReferenceCrossEntropy(s_speech, labels), alpha1), text);
}

Var ContrastiveDirectional(const Var &a, const Var &b, double temperature) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("contrastive batches differ in shape");
  if (a.rows() < 1) throw Error("contrastive batch is empty");
  if (!(temperature > 0.0)) throw Error("temperature must be positive");
  const int n = static_cast<int>(a.rows());
  Var logits = ag::Scale(ag::MatMulNT(ag::NormalizeRows(a), ag::NormalizeRows(b)),
                         1.0 / temperature);
  Var log_probs = ag::LogSoftmaxRows(logits);
  Var total = ag::Pick(log_probs, 0, 0);
  for (int i = 1; i < n; ++i) total = ag::Add(total, ag::Pick(log_probs, i, i));
  return ag::Scale(total, -1.0 / n);
}

Var ContrastiveTotal(const Var &speech, const Var &text, const Var &object, double temperature,
                     const AlignmentSet &alignment, ContrastiveMode mode) {
  if (!alignment.any()) return {};
  auto dir = [&](const Var &x, const Var &y) { return ContrastiveDirectional(x, y, temperature); };
  std::vector<Var> terms;
  if (mode == ContrastiveMode::kSixTerm) {
    if (alignment.text_speech) {
      terms.push_back(dir(text, speech));
      terms.push_back(dir(speech, text));
    }
    if (alignment.speech_object) {
      terms.push_back(dir(speech, object));
      terms.push_back(dir(object, speech));
    }
    if (alignment.text_object) {
      terms.push_back(dir(text, object));
      terms.push_back(dir(object, text));
    }
  } else {
    if (alignment.text_speech) {
      terms.push_back(dir(text, speech));
      terms.push_back(dir(speech, text));
    }
    if (alignment.speech_object && alignment.text_object) {
      terms.push_back(ag::Add(dir(speech, object), dir(text, object)));
      terms.push_back(ag::Add(dir(object, speech), dir(object, text)));
    } else if (alignment.speech_object) {
      terms.push_back(dir(speech, object));
      terms.push_back(dir(object, speech));
    } else if (alignment.text_object) {
      terms.push_back(dir(text, object));
      terms.push_back(dir(object, text));
    }
  }
  Var sum = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) sum = ag::Add(sum, terms[i]);
  return ag::Scale(sum, 1.0 / static_cast<double>(terms.size()));
}

Var TotalLoss(const Var &cls, const Var &ref, const Var &contrastive, const LossConfig &cfg) {
  Var total;
  auto accumulate = [&](const Var &part, double weight) {
    if (!part.valid()) return;
    Var term = ag::Scale(part, weight);
    total = total.valid() ? ag::Add(total, term) : term;
  };
  accumulate(contrastive, cfg.gamma1);
  accumulate(ref, cfg.gamma2);
  accumulate(cls, cfg.gamma3);
  if (!total.valid()) throw Error("total_loss needs at least one component");
  return total;
}

}  // namespace speechground
