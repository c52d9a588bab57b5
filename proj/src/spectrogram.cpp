// src/spectrogram.cpp

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

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "speechground/phonetics.hpp"

namespace speechground {

namespace {

void WriteU32(std::ostream &out, uint32_t v) {
  std::array<unsigned char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b.data()), 4);
}

uint32_t ReadU32(std::istream &in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char *>(b.data()), 4)) throw Error("truncated template file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

void WriteF64(std::ostream &out, double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, 8);
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b.data()), 8);
}

double ReadF64(std::istream &in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char *>(b.data()), 8)) throw Error("truncated template file");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

PhonemeTemplates PhonemeTemplates::Generate(uint64_t seed) {
  const int cols = static_cast<int>(PhonemeInventory().size());
  const int sil = PhonemeIndex("SIL");
  Rng rng(seed);
  PhonemeTemplates t;
  t.templates_ = Matrix::Zero(kMelChannels, cols);
  for (int p = 0; p < cols; ++p) {
    if (p == sil) continue;
    std::vector<double> white(kMelChannels);
    for (auto &w : white) w = Gaussian(rng);
    // 5-tap smoothing gives spectral-envelope-like templates; then
    // standardize to zero mean and unit variance.
    std::vector<double> smooth(kMelChannels, 0.0);
    for (int c = 0; c < kMelChannels; ++c) {
      int n = 0;
      for (int k = -2; k <= 2; ++k) {
        int cc = c + k;
        if (cc < 0 || cc >= kMelChannels) continue;
        smooth[c] += white[cc];
        ++n;
      }
      smooth[c] /= n;
    }
    double mean = 0.0, var = 0.0;
    for (double v : smooth) mean += v;
    mean /= kMelChannels;
    for (double v : smooth) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / kMelChannels);
    for (int c = 0; c < kMelChannels; ++c) t.templates_(c, p) = (smooth[c] - mean) / sd;
  }
  return t;
}

void PhonemeTemplates::Save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteU32(out, kMagic);
  WriteU32(out, kVersion);
  WriteU32(out, static_cast<uint32_t>(templates_.rows()));
  WriteU32(out, static_cast<uint32_t>(templates_.cols()));
  for (Eigen::Index r = 0; r < templates_.rows(); ++r)
    for (Eigen::Index c = 0; c < templates_.cols(); ++c) WriteF64(out, templates_(r, c));
}

PhonemeTemplates PhonemeTemplates::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (ReadU32(in) != kMagic) throw Error(path.string() + ": bad magic");
  if (ReadU32(in) != kVersion) throw Error(path.string() + ": unsupported version");
  uint32_t rows = ReadU32(in), cols = ReadU32(in);
  if (rows != kMelChannels || cols != PhonemeInventory().size())
    throw Error(path.string() + ": template dimensions do not match the inventory");
  PhonemeTemplates t;
  t.templates_.resize(rows, cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) t.templates_(r, c) = ReadF64(in);
  return t;
}

const PhonemeTemplates &PhonemeTemplates::Default() {
  static const PhonemeTemplates t = Load(DataDir() / "phoneme_templates.bin");
  return t;
}

MelSpectrogram SynthSpectrogram(const PhonemeSeq &phonemes, double rate_scale,
                                double noise_level, uint64_t seed,
                                const PhonemeTemplates &templates) {
  if (!(rate_scale >= 0.5 && rate_scale <= 2.0))
    throw Error("rate_scale must lie in [0.5, 2.0]");
  if (phonemes.ids.empty()) throw Error("empty phoneme sequence");
  Rng duration_rng(MixSeed(seed, 0xd0a));
  Rng noise_rng(MixSeed(seed, 0x4015e));
  std::vector<int> frames;
  int total = 0;
  for (size_t i = 0; i < phonemes.ids.size(); ++i) {
    int n = std::max(1, static_cast<int>(std::lround(Uniform(duration_rng, 3.0, 6.0) / rate_scale)));
    frames.push_back(n);
    total += n;
  }
  MelSpectrogram mel;
  mel.bins.resize(kMelChannels, total);
  const double floor = std::log(kMelFloor);
  int col = 0;
  for (size_t i = 0; i < phonemes.ids.size(); ++i) {
    for (int k = 0; k < frames[i]; ++k, ++col) {
      for (int c = 0; c < kMelChannels; ++c) {
        double v = templates.matrix()(c, phonemes.ids[i]);
        if (noise_level > 0.0) v += noise_level * Gaussian(noise_rng);
        mel.bins(c, col) = std::max(v, floor);
      }
    }
  }
  return mel;
}

PhonemeSeq UtterancePhonemes(std::span<const std::string> tokens, const Lexicon &lexicon) {
  PhonemeSeq seq;
  for (const auto &t : tokens) {
    const auto &p = lexicon.G2P(t).ids;
    seq.ids.insert(seq.ids.end(), p.begin(), p.end());
  }
  return seq;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

std::vector<double> MelEdges() {
  std::vector<double> edges(kMelChannels + 2);
  double top = HzToMel(kSampleRate / 2.0);
  for (int i = 0; i < kMelChannels + 2; ++i)
    edges[i] = MelToHz(top * i / (kMelChannels + 1));
  return edges;
}

// 80 x 201 triangular weights on the FFT bin frequencies.
const Matrix &MelFilterbank() {
  static const Matrix bank = [] {
    const int bins = kWindowSamples / 2 + 1;
    auto edges = MelEdges();
    Matrix w = Matrix::Zero(kMelChannels, bins);
    for (int m = 0; m < kMelChannels; ++m) {
      double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (int b = 0; b < bins; ++b) {
        double f = static_cast<double>(b) * kSampleRate / kWindowSamples;
        if (f > lo && f < hi) w(m, b) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
    }
    return w;
  }();
  return bank;
}

std::mutex g_fftw_plan_mutex;

}  // namespace

std::vector<double> MelFilterCenters() {
  auto edges = MelEdges();
  return {edges.begin() + 1, edges.end() - 1};
}

MelSpectrogram ComputeMelSpectrogram(std::span<const double> waveform) {
  if (waveform.size() < static_cast<size_t>(kWindowSamples))
    throw Error("waveform shorter than one 400-sample window");
  const int frames = 1 + static_cast<int>((waveform.size() - kWindowSamples) / kHopSamples);
  const int bins = kWindowSamples / 2 + 1;

  std::vector<double> window(kWindowSamples);
  for (int n = 0; n < kWindowSamples; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kWindowSamples);

  double *in = fftw_alloc_real(kWindowSamples);
  fftw_complex *out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(kWindowSamples, in, out, FFTW_ESTIMATE);
  }

  const Matrix &bank = MelFilterbank();
  MelSpectrogram mel;
  mel.bins.resize(kMelChannels, frames);
  Eigen::VectorXd magnitude(bins);
  for (int f = 0; f < frames; ++f) {
    const double *frame = waveform.data() + static_cast<size_t>(f) * kHopSamples;
    for (int n = 0; n < kWindowSamples; ++n) in[n] = frame[n] * window[n];
    fftw_execute(plan);
    for (int b = 0; b < bins; ++b) magnitude[b] = std::hypot(out[b][0], out[b][1]);
    Eigen::VectorXd energies = bank * magnitude;
    for (int m = 0; m < kMelChannels; ++m)
      mel.bins(m, f) = std::log(std::max(energies[m], kMelFloor));
  }

  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mel;
}

}  // namespace speechground
