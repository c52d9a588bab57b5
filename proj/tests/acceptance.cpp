// tests/acceptance.cpp

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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "speechground/evalmetrics.hpp"
#include "speechground/losses.hpp"
#include "speechground/phonetics.hpp"
#include "speechground/trainer.hpp"
#include "speechground/vocabulary.hpp"
#include "test_util.hpp"

namespace sg = speechground;
namespace ag = speechground::ag;
using ag::Tape;
using ag::Var;

namespace {

int g_failures = 0;

void Report(int id, const char *name, bool pass, const std::string &detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Format(const char *fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Format(const char *fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

sgtest::Rows ToRows(const sg::Matrix &m) {
  sgtest::Rows rows(m.rows(), std::vector<double>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  return rows;
}

// 1: contrastive against six-sum enumeration; cls/ref closed forms.
void LossOracles() {
  sg::Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = sg::UniformInt(rng, 1, 5), d = sg::UniformInt(rng, 2, 16);
    sg::Matrix s = sgtest::RandomMatrix(n, d, rng), t = sgtest::RandomMatrix(n, d, rng),
               o = sgtest::RandomMatrix(n, d, rng);
    Tape tape(false);
    const double got = sg::ContrastiveTotal(tape.Constant(s), tape.Constant(t), tape.Constant(o),
                                            0.07).scalar();
    worst = std::max(worst, std::abs(got - sgtest::SixTermContrastive(ToRows(s), ToRows(t),
                                                                      ToRows(o), 0.07)));
  }
  Tape tape(false);
  const int c = 8, m = 16;
  const double cls = sg::ClsLoss(tape.Constant(sg::Matrix::Constant(1, c, 1.0 / c)), 2).scalar();
  sg::RefLabels labels;
  labels.t.assign(m, 0.0);
  labels.t[5] = 1.0;
  labels.hot = 5;
  Var uniform = tape.Constant(sg::Matrix::Constant(1, m, 1.0 / m));
  const double ref = sg::RefLoss(uniform, uniform, labels, 1.0, 1.0).scalar();
  const double cls_err = std::abs(cls - std::log(c)), ref_err = std::abs(ref - 2.0 * std::log(m));
  Report(1, "loss oracles", worst < 1e-6 && cls_err <= 1e-12 && ref_err <= 1e-12,
         Format("contrastive max |diff| %.2e (tol 1e-6), |cls - ln 8| %.2e, |ref - 2 ln 16| %.2e "
                "(tol 1e-12)",
                worst, cls_err, ref_err));
}

// 2: finite differences over every parameter of the full model and of
// every loss, batch N=4, M=8, C=8.
void GradientSuite() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 4, m = 8;
  sg::Dataset data = sgtest::SmallDataset(n, 1, 202, m);
  std::vector<sg::Sample> samples = sg::PrepareSamples(data, sgtest::SmallInput(m), sgtest::SmallGen(m));
  sg::TrainConfig cfg;
  cfg.model = sgtest::TinyModel();
  cfg.model.share_matcher = false;
  cfg.input = sgtest::SmallInput(m);
  cfg.loss.gamma1 = 0.7;
  cfg.loss.gamma3 = 1.3;
  sg::Model model(cfg.model, cfg.modules, 9);
  const int classes = sg::Vocabulary::Get().num_classes();
  std::vector<const sg::Sample *> batch;
  for (const auto &s : samples) batch.push_back(&s);
  auto model_report = sgtest::FiniteDifferences(sgtest::AllParams(model.params()), [&](Tape &tape) {
    return sg::ComputeBatchLoss(tape, model, batch, cfg, cfg.loss).total;
  });

  sg::Rng rng(203);
  ag::Parameter fs{"F_s", sgtest::RandomMatrix(n, 16, rng), {}};
  ag::Parameter ft{"F_t", sgtest::RandomMatrix(n, 16, rng), {}};
  ag::Parameter fo{"O", sgtest::RandomMatrix(n, 16, rng), {}};
  ag::Parameter ls{"S_s", sgtest::RandomMatrix(1, m, rng, -2, 2), {}};
  ag::Parameter lt{"S_t", sgtest::RandomMatrix(1, m, rng, -2, 2), {}};
  ag::Parameter lc{"p_cls", sgtest::RandomMatrix(1, classes, rng, -2, 2), {}};
  const auto &labels = samples[0].labels;
  double loss_worst = 0.0;
  for (auto mode : {sg::ContrastiveMode::kSixTerm, sg::ContrastiveMode::kFourGroup}) {
    loss_worst = std::max(loss_worst, sgtest::FiniteDifferences({&fs, &ft, &fo}, [&](Tape &t) {
      return sg::ContrastiveTotal(t.Param(fs), t.Param(ft), t.Param(fo), 0.07, {}, mode);
    }).max_rel_error);
  }
  loss_worst = std::max(loss_worst, sgtest::FiniteDifferences({&ls, &lt}, [&](Tape &t) {
    return sg::RefLoss(ag::SoftmaxRows(t.Param(ls)), ag::SoftmaxRows(t.Param(lt)), labels, 1.0, 1.0);
  }).max_rel_error);
  loss_worst = std::max(loss_worst, sgtest::FiniteDifferences({&lc}, [&](Tape &t) {
    return sg::ClsLoss(ag::SoftmaxRows(t.Param(lc)), 3);
  }).max_rel_error);
  const double secs = Seconds(start);
  const bool pass = model_report.max_rel_error < 1e-4 && loss_worst < 1e-4 && secs < 120.0;
  Report(2, "gradient suite", pass,
         Format("model max rel error %.2e in %s over %d entries (%zu tensors, C=%d), losses %.2e; "
                "tol 1e-4; %.1f s (limit 120 s)",
                model_report.max_rel_error, model_report.worst.c_str(), model_report.checked,
                model.params().size(), classes, loss_worst, secs));
}

// 3: IoU against voxel counting; reference labels against exhaustive argmax.
void GeometryOracle() {
  sg::Rng rng(301);
  auto random_box = [&] {
    sg::Box3D b;
    for (int ax = 0; ax < 3; ++ax) {
      b.center[ax] = sg::Uniform(rng, 0.0, 1.2);
      b.size[ax] = sg::Uniform(rng, 0.2, 1.5);
    }
    return b;
  };
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    sg::Box3D a = random_box(), b = random_box();
    worst = std::max(worst, std::abs(sg::Iou(a, b) - sgtest::VoxelIou(a, b)));
  }
  int agree = 0;
  for (int set = 0; set < 200; ++set) {
    sg::Box3D gt = random_box();
    sg::ProposalSet p;
    const int m = sg::UniformInt(rng, 1, 16);
    for (int i = 0; i < m; ++i) {
      p.boxes.push_back(i > 0 && sg::Uniform(rng, 0, 1) < 0.2 ? p.boxes[sg::UniformInt(rng, 0, i - 1)]
                                                              : random_box());
      p.source_instance.push_back(-1);
    }
    agree += sg::MakeRefLabels(p, gt).hot == sgtest::BruteForceHot(p.boxes, gt);
  }
  Report(3, "geometry oracle", worst < 1e-3 && agree == 200,
         Format("IoU max |diff| vs voxels %.2e over 100 pairs (tol 1e-3); ref labels agree on "
                "%d/200 sets",
                worst, agree));
}

struct SeedRuns {
  sg::Breakdown baseline, sll;
  std::vector<sg::Breakdown> full_by_beta;  // beta 0, 0.5, 1
  double confusion_cos = 0.0, cross_cos = 0.0;
};

double Cos(const sg::RowVector &a, const sg::RowVector &b) {
  return a.dot(b) / (a.norm() * b.norm());
}

sg::Matrix Speech(const std::vector<std::string> &tokens, const sg::InputConfig &input,
                  uint64_t seed) {
  return sg::StackFrames(sg::SynthSpectrogram(sg::UtterancePhonemes(tokens), input.rate_scale,
                                              input.noise_level, seed));
}

// Mean F_s cosine between utterances differing by one confusable word and
// between utterances with different target classes.
void PhoneticSimilarity(const sg::Model &model, const sg::Dataset &val,
                        const sg::InputConfig &input, SeedRuns &out) {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"grey", "grain"}, {"white", "wide"}, {"bed", "bat"}};
  double conf = 0.0;
  int nconf = 0;
  for (size_t i = 0; i < val.utterances.size(); ++i) {
    const auto &u = val.utterances[i];
    for (const auto &[word, variant] : pairs) {
      for (size_t k = 0; k < u.tokens.size(); ++k) {
        if (u.tokens[k] != word) continue;
        auto other = u.tokens;
        other[k] = variant;
        const auto a = model.SpeechFeature(Speech(u.tokens, input, sg::MixSeed(u.corruption_seed, 71)));
        const auto b = model.SpeechFeature(Speech(other, input, sg::MixSeed(u.corruption_seed, 72)));
        conf += Cos(a, b);
        ++nconf;
        break;
      }
    }
  }
  double cross = 0.0;
  int ncross = 0;
  sg::Rng rng(707);
  const int n = static_cast<int>(val.utterances.size());
  while (ncross < nconf) {
    const auto &a = val.utterances[sg::UniformInt(rng, 0, n - 1)];
    const auto &b = val.utterances[sg::UniformInt(rng, 0, n - 1)];
    const auto &sa = val.scenes[val.SceneIndex(a.scene_id)];
    const auto &sb = val.scenes[val.SceneIndex(b.scene_id)];
    if (sa.Object(a.target_instance_id).class_id == sb.Object(b.target_instance_id).class_id)
      continue;
    cross += Cos(model.SpeechFeature(Speech(a.tokens, input, sg::MixSeed(a.corruption_seed, 71))),
                 model.SpeechFeature(Speech(b.tokens, input, sg::MixSeed(b.corruption_seed, 72))));
    ++ncross;
  }
  out.confusion_cos = conf / std::max(nconf, 1);
  out.cross_cos = cross / std::max(ncross, 1);
}

double Mean(const std::vector<SeedRuns> &runs, const std::function<double(const SeedRuns &)> &f) {
  double s = 0.0;
  for (const auto &r : runs) s += f(r);
  return s / static_cast<double>(runs.size());
}

// 4-7 share one set of trainings.
void DirectionalCriteria() {
  const auto start = std::chrono::steady_clock::now();
  sg::Config base;  // 400 train scenes x 6, 250 val scenes x 8, error_rate 0.3
  sg::Dataset train = sg::GenerateDataset({base.scenes, base.utterances_per_scene, 1, "scene"}, base.gen);
  sg::Dataset val = sg::GenerateDataset(
      {base.val_scenes, base.val_utterances_per_scene, sg::MixSeed(1, 0x7a1), "val"}, base.gen);
  sg::TrainConfig cfg = base.train;
  cfg.epochs = 12;
  cfg.eval_every = 0;
  std::vector<sg::Sample> train_samples = sg::PrepareSamples(train, cfg.input, base.gen);
  std::vector<sg::Sample> val_samples = sg::PrepareSamples(val, cfg.input, base.gen);
  std::printf("     split: %zu train / %zu val utterances, error_rate %.2f, %d epochs\n",
              train_samples.size(), val_samples.size(), cfg.input.error_rate, cfg.epochs);
  std::fflush(stdout);
  sg::TrainingData data{&train_samples, nullptr, nullptr};

  std::vector<SeedRuns> runs;
  double config_secs[3] = {0, 0, 0};
  for (uint64_t seed : {1, 2, 3}) {
    SeedRuns r;
    cfg.seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    cfg.modules = {false, false, false};
    r.baseline = sg::Evaluate(sg::Train(cfg, data).model, val_samples, cfg.loss.beta);
    config_secs[0] += Seconds(t0);

    t0 = std::chrono::steady_clock::now();
    cfg.modules = {true, false, false};
    r.sll = sg::Evaluate(sg::Train(cfg, data).model, val_samples, cfg.loss.beta);
    config_secs[1] += Seconds(t0);

    t0 = std::chrono::steady_clock::now();
    cfg.modules = {true, true, true};
    sg::TrainResult full = sg::Train(cfg, data);
    auto scores = sg::Infer(full.model, val_samples);
    for (double beta : {0.0, 0.5, 1.0})
      r.full_by_beta.push_back(
          sg::ComputeBreakdown(sg::MakeRecords(full.model, scores, val_samples, beta)));
    config_secs[2] += Seconds(t0);
    PhoneticSimilarity(full.model, val, cfg.input, r);
    std::printf("     seed %llu: baseline %.2f/%.2f  +SLL %.2f/%.2f  full %.2f/%.2f  "
                "(overall Acc@0.25/Acc@0.5)\n",
                static_cast<unsigned long long>(seed), r.baseline.overall[0].accuracy,
                r.baseline.overall[1].accuracy, r.sll.overall[0].accuracy,
                r.sll.overall[1].accuracy, r.full_by_beta[1].overall[0].accuracy,
                r.full_by_beta[1].overall[1].accuracy);
    std::fflush(stdout);
    runs.push_back(std::move(r));
  }

  auto acc = [](const sg::Breakdown &b, int k) { return b.overall[k].accuracy; };
  const double base50 = Mean(runs, [&](const SeedRuns &r) { return acc(r.baseline, 1); });
  const double full50 = Mean(runs, [&](const SeedRuns &r) { return acc(r.full_by_beta[1], 1); });
  const double slowest = std::max({config_secs[0], config_secs[1], config_secs[2]});
  Report(4, "directional main result", full50 - base50 >= 3.0 && slowest < 900.0,
         Format("mean overall Acc@0.5 full %.2f vs baseline %.2f, gain %.2f (need >= 3); slowest "
                "configuration %.0f s for 3 seeds (limit 900 s)",
                full50, base50, full50 - base50, slowest));

  double b[3][2];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k)
      b[i][k] = Mean(runs, [&](const SeedRuns &r) { return acc(r.full_by_beta[i], k); });
  const bool shape = b[1][0] >= b[0][0] && b[1][0] >= b[2][0] && b[1][1] >= b[0][1] &&
                     b[1][1] >= b[2][1];
  Report(5, "beta-sweep shape", shape,
         Format("Acc@0.25 beta=0/0.5/1: %.2f/%.2f/%.2f; Acc@0.5: %.2f/%.2f/%.2f", b[0][0], b[1][0],
                b[2][0], b[0][1], b[1][1], b[2][1]));

  const double base25 = Mean(runs, [&](const SeedRuns &r) { return acc(r.baseline, 0); });
  const double sll25 = Mean(runs, [&](const SeedRuns &r) { return acc(r.sll, 0); });
  const double full25 = Mean(runs, [&](const SeedRuns &r) { return acc(r.full_by_beta[1], 0); });
  Report(6, "module monotonicity", base25 <= sll25 && sll25 <= full25 && full25 - base25 >= 2.0,
         Format("mean overall Acc@0.25 baseline %.2f <= +SLL %.2f <= full %.2f; full - baseline "
                "%.2f (need >= 2)",
                base25, sll25, full25, full25 - base25));

  bool all_positive = true;
  std::string margins;
  for (const auto &r : runs) {
    const double margin = r.confusion_cos - r.cross_cos;
    all_positive &= margin > 0.0;
    margins += Format("%s%.3f (%.3f vs %.3f)", margins.empty() ? "" : ", ", margin,
                      r.confusion_cos, r.cross_cos);
  }
  Report(7, "phonetic similarity", all_positive,
         "confusion-pair minus cross-class F_s cosine per seed: " + margins);
  std::printf("     criteria 4-7 took %.0f s\n", Seconds(start));
}

// 8: silence gives the floor with the expected frame count; a 440 Hz tone
// peaks in the bin predicted by a direct DFT and filterbank.
void MelFrontEnd() {
  bool silence_ok = true;
  for (int len : {400, 401, 559, 560, 16000, 16123}) {
    auto mel = sg::ComputeMelSpectrogram(std::vector<double>(len, 0.0));
    silence_ok &= mel.num_frames() == 1 + (len - 400) / 160;
    silence_ok &= (mel.bins.array() == std::log(1e-10)).all();
  }
  std::vector<double> tone(16000);
  for (size_t t = 0; t < tone.size(); ++t)
    tone[t] = std::sin(2.0 * std::numbers::pi * 440.0 * t / 16000.0);
  auto mel = sg::ComputeMelSpectrogram(tone);
  auto oracle = sgtest::OracleLogMel(tone);
  int matched = 0, want_bin = 0;
  for (int f = 0; f < mel.num_frames(); ++f) {
    int want = 0;
    for (int m = 1; m < 80; ++m)
      if (oracle[f][m] > oracle[f][want]) want = m;
    Eigen::Index got;
    mel.bins.col(f).maxCoeff(&got);
    matched += got == want;
    want_bin = want;
  }
  Report(8, "mel front end", silence_ok && matched == mel.num_frames(),
         Format("silence floor and L = 1 + floor((len-400)/160) %s; 440 Hz peak in oracle bin %d "
                "on %d/%d frames",
                silence_ok ? "hold" : "violated", want_bin, matched, mel.num_frames()));
}

int RunCli(const std::string &args) {
  const std::string cmd = std::string(SPEECHGROUND_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9: every command re-run with the same config and seed writes identical
// metrics files.
void Determinism() {
  sgtest::TempDir dir("accept_det");
  sgtest::WriteFile(dir / "run.cfg",
                    "scenes = 16\nval_scenes = 8\nutterances_per_scene = 3\n"
                    "val_utterances_per_scene = 3\nepochs = 3\nbatch_size = 8\n");
  const std::string cfg = " --config " + (dir / "run.cfg").string() + " --seed 4";
  const std::string data = (dir / "data").string();
  int failures = 0, compared = 0;
  auto same = [&](const std::string &a, const std::string &b) {
    ++compared;
    const std::string x = sgtest::ReadFile(dir / a), y = sgtest::ReadFile(dir / b);
    if (x.empty() || x != y) ++failures;
  };
  for (const char *r : {"d1", "d2"}) failures += RunCli("gen-data" + cfg + " --out " + (dir / r).string()) != 0;
  same("d1/train/utterances.jsonl", "d2/train/utterances.jsonl");
  same("d1/val/scenes.jsonl", "d2/val/scenes.jsonl");
  failures += RunCli("gen-data" + cfg + " --out " + data) != 0;
  for (const char *r : {"t1", "t2"})
    failures += RunCli("train" + cfg + " --data " + data + " --out " + (dir / r).string()) != 0;
  for (const char *f : {"metrics.csv", "runlog.jsonl", "model.ckpt"})
    same(std::string("t1/") + f, std::string("t2/") + f);
  for (const char *r : {"e1", "e2"})
    failures += RunCli("eval" + cfg + " --data " + data + " --match-rate --checkpoint " +
                       (dir / "t1/model.ckpt").string() + " --out " + (dir / r).string()) != 0;
  same("e1/metrics.csv", "e2/metrics.csv");
  same("e1/match_rate.csv", "e2/match_rate.csv");
  for (const char *r : {"a1", "a2"})
    failures += RunCli("ablate" + cfg + " --data " + data +
                       " --sweep modules --seeds 1,2 --out " + (dir / r).string()) != 0;
  same("a1/ablation.csv", "a2/ablation.csv");
  same("a1/ablation_summary.csv", "a2/ablation_summary.csv");
  for (const char *r : {"g1", "g2"})
    failures += RunCli("gradcheck" + cfg + " --set gradcheck_entries=8 --out " + (dir / r).string()) != 0;
  same("g1/gradcheck.csv", "g2/gradcheck.csv");
  for (const char *r : {"p1", "p2"})
    failures += RunCli("plot --out " + (dir / r).string() + " " + (dir / "a1/ablation_summary.csv").string() +
                       " " + (dir / "t1/runlog.jsonl").string()) != 0;
  same("p1/ablation_summary_bars.csv", "p2/ablation_summary_bars.csv");
  same("p1/runlog_loss.svg", "p2/runlog_loss.svg");
  Report(9, "determinism", failures == 0,
         Format("%d file pairs compared across gen-data, train, eval, ablate, gradcheck and plot; "
                "%d mismatches or failed commands",
                compared, failures));
}

// 10: a 16-sample subset is fitted within 500 steps.
void Overfit() {
  sg::Config base;
  sg::Dataset d = sg::GenerateDataset({8, 2, 1001, "fit"}, base.gen);
  std::vector<sg::Sample> subset = sg::PrepareSamples(d, base.train.input, base.gen);
  sg::TrainConfig cfg = base.train;
  cfg.epochs = 1000;
  cfg.max_steps = 500;
  cfg.eval_every = 0;
  auto result = sg::Train(cfg, {&subset, nullptr, nullptr});
  auto b = sg::Evaluate(result.model, subset, cfg.loss.beta);
  Report(10, "overfit sanity", b.overall[0].accuracy >= 95.0 && b.overall[1].accuracy >= 95.0,
         Format("%zu samples after %d steps: Acc@0.25 %.2f, Acc@0.5 %.2f (need >= 95)",
                subset.size(), result.log.epochs.back().steps, b.overall[0].accuracy,
                b.overall[1].accuracy));
}

}  // namespace

int main() {
  sg::TuneAllocator();
  const auto start = std::chrono::steady_clock::now();
  try {
    LossOracles();
    GradientSuite();
    GeometryOracle();
    MelFrontEnd();
    Determinism();
    Overfit();
    DirectionalCriteria();
  } catch (const std::exception &e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed; total %.0f s\n", g_failures, Seconds(start));
  return g_failures == 0 ? 0 : 1;
}
