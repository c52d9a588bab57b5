// tests/test_trainer.cpp

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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "speechground/trainer.hpp"
#include "test_util.hpp"

namespace sg = speechground;
using sg::ag::Tape;

namespace {

constexpr int kM = 8;

struct Fixture {
  sg::Dataset train_set = sgtest::SmallDataset(8, 2, 41, kM);
  sg::Dataset val_set = sgtest::SmallDataset(4, 2, 42, kM);
  std::vector<sg::Sample> train = sg::PrepareSamples(train_set, sgtest::SmallInput(kM), sgtest::SmallGen(kM));
  std::vector<sg::Sample> val = sg::PrepareSamples(val_set, sgtest::SmallInput(kM), sgtest::SmallGen(kM));

  sg::TrainConfig Config(sg::ModuleToggles modules = {}) const {
    sg::TrainConfig cfg;
    cfg.model = sgtest::TinyModel();
    cfg.input = sgtest::SmallInput(kM);
    cfg.modules = modules;
    cfg.batch_size = 4;
    cfg.epochs = 3;
    cfg.eval_every = 0;
    return cfg;
  }
  std::vector<const sg::Sample *> Batch(int n = 4) const {
    std::vector<const sg::Sample *> b;
    for (int i = 0; i < n; ++i) b.push_back(&train[i]);
    return b;
  }
};

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("batch loss gradients under every module combination") {
  Fixture f;
  for (sg::ModuleToggles m : {sg::ModuleToggles{false, false, false}, sg::ModuleToggles{true, false, false},
                              sg::ModuleToggles{true, false, true}, sg::ModuleToggles{true, true, true},
                              sg::ModuleToggles{false, true, false}}) {
    sg::TrainConfig cfg = f.Config(m);
    sg::Model model(cfg.model, cfg.modules, 5);
    auto batch = f.Batch();
    auto ours = sgtest::FiniteDifferences(sgtest::AllParams(model.params()), [&](Tape &tape) {
      return sg::ComputeBatchLoss(tape, model, batch, cfg, cfg.loss).total;
    }, 1e-5, 6);
    CHECK_MESSAGE(ours.max_rel_error < 1e-4, ours.worst, " ", ours.max_rel_error);
    std::vector<sg::Sample> copy(f.train.begin(), f.train.begin() + 4);
    auto lib = sg::GradCheckModel(cfg, copy, 1e-5, 6);
    CHECK_MESSAGE(lib.max_rel_error < 1e-4, lib.worst, " ", lib.max_rel_error);
    CHECK(lib.groups.size() == model.params().size());
  }
}

TEST_CASE("gradient checker flags a wrong gradient") {
  sg::ParameterStore store;
  auto &p = store.Add("p", sg::Matrix{{0.3, -0.7}});
  auto ok = sg::GradCheck(store, [&](Tape &tape) {
    auto v = tape.Param(p);
    return sg::ag::Sum(sg::ag::MatMulNT(v, v));
  }, 1e-5);
  CHECK(ok.max_rel_error < 1e-8);
  // custom op with a deliberately halved backward
  auto bad = sg::GradCheck(store, [&](Tape &tape) {
    auto v = tape.Param(p);
    sg::Matrix sq = v.value().array().square();
    return sg::ag::Sum(tape.Push(sq, {v}, [in = v.index()](Tape &t, int self) {
      if (t.RequiresGrad(in)) t.GradOf(in).array() += t.OutGrad(self).array() * t.ValueOf(in).array();
    }));
  }, 1e-5);
  CHECK(bad.max_rel_error > 0.1);
  CHECK(bad.worst == "p");
}

TEST_CASE("loss parts follow the module toggles") {
  Fixture f;
  auto batch = f.Batch();
  {
    auto cfg = f.Config({false, false, false});
    sg::Model model(cfg.model, cfg.modules, 1);
    Tape tape(false);
    auto parts = sg::ComputeBatchLoss(tape, model, batch, cfg, cfg.loss);
    CHECK_FALSE(parts.contrastive.valid());
    CHECK_FALSE(parts.cls.valid());
    CHECK(parts.total.scalar() == doctest::Approx(parts.ref.scalar()));
  }
  {
    auto cfg = f.Config({true, true, false});
    sg::Model model(cfg.model, cfg.modules, 1);
    Tape tape(false);
    auto parts = sg::ComputeBatchLoss(tape, model, batch, cfg, cfg.loss);
    CHECK_FALSE(parts.contrastive.valid());
    CHECK(parts.cls.valid());
  }
  {
    auto cfg = f.Config({true, true, true});
    cfg.loss.gamma1 = 0.5;
    cfg.loss.gamma3 = 2.0;
    sg::Model model(cfg.model, cfg.modules, 1);
    Tape tape(false);
    auto parts = sg::ComputeBatchLoss(tape, model, batch, cfg, cfg.loss);
    REQUIRE(parts.contrastive.valid());
    CHECK(parts.total.scalar() ==
          doctest::Approx(0.5 * parts.contrastive.scalar() + parts.ref.scalar() +
                          2.0 * parts.cls.scalar()));
    // mean of per-sample reference losses
    double ref = 0.0;
    for (const auto *s : batch) {
      Tape t(false);
      auto out = model.Forward(t, *s, true);
      ref += sg::RefLoss(out.speech_scores, out.text_scores, s->labels, 1.0, 1.0).scalar();
    }
    CHECK(parts.ref.scalar() == doctest::Approx(ref / batch.size()).epsilon(1e-12));
  }
}

TEST_CASE("without the confidence branch selections follow the text scores") {
  Fixture f;
  auto cfg = f.Config({true, false, true});
  auto result = sg::Train(cfg, {&f.train, nullptr, nullptr});
  auto sel = sg::Selections(result.model, f.val, 0.5);
  auto sel0 = sg::Selections(result.model, f.val, 1.0);
  for (size_t i = 0; i < f.val.size(); ++i) {
    auto b = result.model.Branches(f.val[i]);
    CHECK(b.speech_scores.size() == 0);
    CHECK(sel[i] == sg::SelectBox(b.text_scores));
    CHECK(sel0[i] == sel[i]);
  }
}

TEST_CASE("fusion endpoints reproduce single branches") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  sg::Model model(cfg.model, cfg.modules, 3);
  auto b = model.Branches(f.val[0]);
  CHECK(model.Fuse(b, 0.0).fused == b.text_scores);
  CHECK(model.Fuse(b, 1.0).fused == b.speech_scores);
  CHECK(model.Fuse(b, 0.5).fused.sum() == doctest::Approx(1.0));
}

TEST_CASE("loss decreases over 50 steps") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  cfg.epochs = 100;
  cfg.max_steps = 50;
  auto result = sg::Train(cfg, {&f.train, nullptr, nullptr});
  const auto &log = result.log.epochs;
  REQUIRE(log.size() >= 12u);
  CHECK(log.back().steps == 50);
  CHECK(log.back().total < 0.8 * log.front().total);
  CHECK(log.back().ref < log.front().ref);
}

TEST_CASE("training is deterministic and checkpoints restore it") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  cfg.eval_every = 2;
  sg::TrainingData data{&f.train, nullptr, &f.val};
  auto a = sg::Train(cfg, data), b = sg::Train(cfg, data);
  CHECK(a.log.ToJsonl() == b.log.ToJsonl());
  for (size_t i = 0; i < a.model.params().size(); ++i)
    CHECK(a.model.params().at(i).value == b.model.params().at(i).value);
  REQUIRE(a.log.epochs.size() == 3u);
  CHECK_FALSE(a.log.epochs[0].validation.has_value());
  CHECK(a.log.epochs[1].validation.has_value());
  CHECK(a.log.epochs[2].validation.has_value());

  cfg.seed = 2;
  auto c = sg::Train(cfg, data);
  CHECK(c.log.ToJsonl() != a.log.ToJsonl());

  sgtest::TempDir dir("trained");
  cfg.seed = 1;
  a.model.params().Save(dir / "m.ckpt");
  sg::Model restored = sg::LoadModel(cfg, dir / "m.ckpt");
  CHECK(sg::Selections(restored, f.val, 0.5) == sg::Selections(a.model, f.val, 0.5));
  CHECK(sg::Evaluate(restored, f.val, 0.5) == sg::Evaluate(a.model, f.val, 0.5));
}

TEST_CASE("run log records") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  auto result = sg::Train(cfg, {&f.train, nullptr, &f.val});
  result.log.checkpoint = "model.ckpt";
  const std::string text = result.log.ToJsonl();
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == cfg.epochs + 1);
  CHECK(text.find("\"checkpoint\":\"model.ckpt\"") != std::string::npos);
}

TEST_CASE("gamma calibration balances the first batch") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  cfg.calibrate_gammas = true;
  cfg.epochs = 1;
  auto result = sg::Train(cfg, {&f.train, nullptr, nullptr});
  const auto &g = result.log.effective_loss;

  sg::Model fresh(cfg.model, cfg.modules, cfg.seed);
  Tape tape(false);
  auto parts = sg::ComputeBatchLoss(tape, fresh, f.Batch(), cfg, cfg.loss);
  const double ref = g.gamma2 * parts.ref.scalar();
  CHECK(g.gamma1 * parts.contrastive.scalar() == doctest::Approx(ref).epsilon(1e-9));
  CHECK(g.gamma3 * parts.cls.scalar() == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("divergence is reported") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  cfg.learning_rate = 1e300;
  cfg.epochs = 5;
  try {
    sg::Train(cfg, {&f.train, nullptr, nullptr});
    FAIL("expected divergence");
  } catch (const sg::TrainingError &e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("two-phase schedule needs the clean copy") {
  Fixture f;
  auto cfg = f.Config({true, true, true});
  cfg.clean_epochs = 1;
  CHECK_THROWS_AS(sg::Train(cfg, {&f.train, nullptr, nullptr}), sg::Error);
  sg::InputConfig clean = cfg.input;
  clean.noise_level = 0.0;
  auto clean_samples = sg::PrepareSamples(f.train_set, clean, sgtest::SmallGen(kM));
  auto two = sg::Train(cfg, {&f.train, &clean_samples, nullptr});
  cfg.clean_epochs = 0;
  auto one = sg::Train(cfg, {&f.train, nullptr, nullptr});
  CHECK(two.log.epochs[0].total != one.log.epochs[0].total);
  CHECK_THROWS_AS(sg::Train(cfg, {nullptr, nullptr, nullptr}), sg::Error);
}

TEST_CASE("overfits a tiny subset") {
  Fixture f;
  std::vector<sg::Sample> subset(f.train.begin(), f.train.begin() + 16);
  auto cfg = f.Config({true, true, true});
  cfg.model = sg::ModelConfig{};
  cfg.epochs = 1000;
  cfg.max_steps = 500;
  auto result = sg::Train(cfg, {&subset, nullptr, nullptr});
  auto b = sg::Evaluate(result.model, subset, cfg.loss.beta);
  CHECK(b.overall[1].accuracy >= 95.0);
}

}  // TEST_SUITE
