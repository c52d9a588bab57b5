// src/trainer.cpp

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

#include "speechground/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace speechground {

namespace {

Var MeanOf(const std::vector<Var> &parts) {
  if (parts.empty()) return {};
  Var sum = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) sum = ag::Add(sum, parts[i]);
  return ag::Scale(sum, 1.0 / static_cast<double>(parts.size()));
}

double ValueOr0(const Var &v) { return v.valid() ? v.scalar() : 0.0; }

void Shuffle(std::vector<int> &order, Rng &rng) {
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
    std::swap(order[i], order[UniformInt(rng, 0, i)]);
}

}  // namespace

BatchLoss ComputeBatchLoss(Tape &tape, const Model &model, std::span<const Sample *const> batch,
                           const TrainConfig &cfg, const LossConfig &loss) {
  if (batch.empty()) throw Error("empty batch");
  const ModuleToggles &mods = cfg.modules;
  std::vector<Var> refs, clss, speech, text, object;
  for (const Sample *s : batch) {
    ForwardOutput f = model.Forward(tape, *s, mods.sll || mods.ccm);
    refs.push_back(RefLoss(mods.cbm ? f.speech_scores : Var(), f.text_scores, s->labels,
                           loss.alpha1, loss.alpha2));
    if (mods.sll) clss.push_back(ClsLoss(f.class_probs, s->target_class));
    if (mods.ccm) {
      speech.push_back(f.speech_feature);
      text.push_back(f.text_feature);
      object.push_back(f.object_anchor);
    }
  }
  BatchLoss out;
  out.ref = MeanOf(refs);
  out.cls = MeanOf(clss);
  if (mods.ccm)
    out.contrastive = ContrastiveTotal(ag::ConcatRows(speech), ag::ConcatRows(text),
                                       ag::ConcatRows(object), loss.temperature, cfg.alignment,
                                       loss.contrastive_mode);
  out.total = TotalLoss(out.cls, out.ref, out.contrastive, loss);
  return out;
}

std::string RunLog::ToJsonl() const {
  using nlohmann::ordered_json;
  std::string out;
  for (const auto &e : epochs) {
    ordered_json j;
    j["epoch"] = e.epoch;
    j["steps"] = e.steps;
    j["loss_total"] = e.total;
    j["loss_contrastive"] = e.contrastive;
    j["loss_ref"] = e.ref;
    j["loss_cls"] = e.cls;
    if (e.validation) {
      ordered_json rows = ordered_json::array();
      auto add = [&](const char *name, const std::array<BreakdownCell, 2> &cells) {
        for (int k = 0; k < 2; ++k)
          rows.push_back({{"subset", name},
                          {"thresh", kThresholds[k]},
                          {"accuracy", cells[k].accuracy},
                          {"n", cells[k].n}});
      };
      if (e.validation->unique) add("unique", *e.validation->unique);
      if (e.validation->multiple) add("multiple", *e.validation->multiple);
      add("overall", e.validation->overall);
      j["validation"] = rows;
    }
    out += j.dump() + "\n";
  }
  ordered_json fin;
  fin["gamma1"] = effective_loss.gamma1;
  fin["gamma2"] = effective_loss.gamma2;
  fin["gamma3"] = effective_loss.gamma3;
  fin["checkpoint"] = checkpoint;
  out += fin.dump() + "\n";
  return out;
}

void RunLog::Write(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << ToJsonl();
}

namespace {

LossConfig Calibrate(const Model &model, const TrainConfig &cfg, std::span<const Sample *const> batch) {
  Tape tape(false);
  BatchLoss parts = ComputeBatchLoss(tape, model, batch, cfg, cfg.loss);
  LossConfig out = cfg.loss;
  const double ref = cfg.loss.gamma2 * parts.ref.scalar();
  if (parts.contrastive.valid() && parts.contrastive.scalar() > 0.0)
    out.gamma1 = ref / parts.contrastive.scalar();
  if (parts.cls.valid() && parts.cls.scalar() > 0.0) out.gamma3 = ref / parts.cls.scalar();
  return out;
}

}  // namespace

TrainResult Train(const TrainConfig &cfg, const TrainingData &data,
                  const std::function<void(const EpochLog &)> &on_epoch) {
  cfg.Validate();
  if (data.train == nullptr || data.train->empty()) throw Error("training set is empty");
  if (cfg.clean_epochs > 0 &&
      (data.clean_train == nullptr || data.clean_train->size() != data.train->size()))
    throw Error("two-phase schedule needs a clean copy of the training set");

  Model model(cfg.model, cfg.modules, cfg.seed);
  AdamOptimizer adam(cfg.learning_rate);
  Rng order_rng(MixSeed(cfg.seed, 0x0bde5));

  int n = static_cast<int>(data.train->size());
  if (cfg.train_limit > 0) n = std::min(n, cfg.train_limit);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  TrainResult result{std::move(model), {}};
  Model &m = result.model;
  LossConfig loss = cfg.loss;
  if (cfg.calibrate_gammas) {
    std::vector<const Sample *> first;
    for (int i = 0; i < std::min(n, cfg.batch_size); ++i) first.push_back(&(*data.train)[i]);
    loss = Calibrate(m, cfg, first);
  }
  result.log.effective_loss = loss;

  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
    const std::vector<Sample> &source =
        epoch <= cfg.clean_epochs ? *data.clean_train : *data.train;
    Shuffle(order, order_rng);
    EpochLog log;
    log.epoch = epoch;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
      std::vector<const Sample *> batch;
      for (int i = start; i < std::min(n, start + cfg.batch_size); ++i)
        batch.push_back(&source[order[i]]);
      Tape tape;
      BatchLoss parts = ComputeBatchLoss(tape, m, batch, cfg, loss);
      const double total = parts.total.scalar();
      if (!std::isfinite(total))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batches + 1));
      m.params().ZeroGrad();
      tape.Backward(parts.total);
      adam.Step(m.params());
      ++step;
      ++batches;
      log.total += total;
      log.contrastive += ValueOr0(parts.contrastive);
      log.ref += ValueOr0(parts.ref);
      log.cls += ValueOr0(parts.cls);
    }
    if (batches > 0) {
      log.total /= batches;
      log.contrastive /= batches;
      log.ref /= batches;
      log.cls /= batches;
    }
    log.steps = step;
    const bool last = epoch == cfg.epochs || (cfg.max_steps > 0 && step >= cfg.max_steps);
    const bool due = cfg.eval_every > 0 && epoch % cfg.eval_every == 0;
    if (data.val != nullptr && !data.val->empty() && (due || last))
      log.validation = Evaluate(m, *data.val, cfg.loss.beta);
    result.log.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

Model LoadModel(const TrainConfig &cfg, const std::filesystem::path &checkpoint) {
  Model model(cfg.model, cfg.modules, cfg.seed);
  model.params().Load(checkpoint);
  return model;
}

std::vector<BranchScores> Infer(const Model &model, std::span<const Sample> samples) {
  std::vector<BranchScores> out;
  out.reserve(samples.size());
  for (const auto &s : samples) out.push_back(model.Branches(s));
  return out;
}

std::vector<EvalRecord> MakeRecords(const Model &model, std::span<const BranchScores> scores,
                                    std::span<const Sample> samples, double beta) {
  if (samples.empty()) throw Error("evaluation set is empty");
  if (scores.size() != samples.size()) throw Error("score count differs from sample count");
  std::vector<EvalRecord> records;
  records.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    ProposalScores fused = model.Fuse(scores[i], beta);
    auto [index, box] = SelectBox(fused.fused, samples[i].proposals);
    EvalRecord r;
    r.predicted = box;
    r.ground_truth = samples[i].ground_truth;
    r.subset_tag = samples[i].subset_tag;
    r.predicted_index = index;
    r.target_index = samples[i].labels.hot;
    records.push_back(r);
  }
  return records;
}

Breakdown Evaluate(const Model &model, std::span<const Sample> samples, double beta) {
  if (samples.empty()) throw Error("evaluation set is empty");
  auto scores = Infer(model, samples);
  return ComputeBreakdown(MakeRecords(model, scores, samples, beta));
}

std::vector<int> Selections(const Model &model, std::span<const Sample> samples, double beta) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto &s : samples) out.push_back(SelectBox(model.Score(s, beta).fused));
  return out;
}

GradCheckReport GradCheck(ParameterStore &store, const std::function<Var(Tape &)> &loss,
                          double epsilon, int max_entries, uint64_t seed) {
  store.ZeroGrad();
  {
    Tape tape;
    Var l = loss(tape);
    tape.Backward(l);
  }
  auto evaluate = [&] {
    Tape tape(false);
    return loss(tape).scalar();
  };
  Rng rng(MixSeed(seed, 0x67c));
  GradCheckReport report;
  for (size_t p = 0; p < store.size(); ++p) {
    ag::Parameter &param = store.at(p);
    const Eigen::Index size = param.value.size();
    std::vector<Eigen::Index> entries(size);
    for (Eigen::Index i = 0; i < size; ++i) entries[i] = i;
    if (max_entries > 0 && size > max_entries) {
      for (int k = 0; k < max_entries; ++k)
        std::swap(entries[k], entries[UniformInt(rng, k, static_cast<int>(size) - 1)]);
      entries.resize(max_entries);
      std::sort(entries.begin(), entries.end());
    }
    double diff = 0.0, analytic_norm = 0.0, numeric_norm = 0.0;
    for (Eigen::Index i : entries) {
      double analytic = param.grad.size() == size ? param.grad.data()[i] : 0.0;
      double &x = param.value.data()[i];
      const double saved = x;
      x = saved + epsilon;
      double plus = evaluate();
      x = saved - epsilon;
      double minus = evaluate();
      x = saved;
      double numeric = (plus - minus) / (2.0 * epsilon);
      diff += (analytic - numeric) * (analytic - numeric);
      analytic_norm += analytic * analytic;
      numeric_norm += numeric * numeric;
    }
    double denom = std::max({std::sqrt(analytic_norm), std::sqrt(numeric_norm), kGradNormFloor});
    GradCheckGroup g{param.name, std::sqrt(diff) / denom, static_cast<int>(entries.size())};
    if (report.groups.empty() || g.rel_error > report.max_rel_error) {
      report.max_rel_error = g.rel_error;
      report.worst = g.name;
    }
    report.groups.push_back(g);
  }
  store.ZeroGrad();
  return report;
}

GradCheckReport GradCheckModel(const TrainConfig &cfg, std::span<const Sample> batch,
                               double epsilon, int max_entries) {
  Model model(cfg.model, cfg.modules, cfg.seed);
  std::vector<const Sample *> ptrs;
  for (const auto &s : batch) ptrs.push_back(&s);
  auto loss = [&](Tape &tape) { return ComputeBatchLoss(tape, model, ptrs, cfg, cfg.loss).total; };
  return GradCheck(model.params(), loss, epsilon, max_entries, cfg.seed);
}

}  // namespace speechground
