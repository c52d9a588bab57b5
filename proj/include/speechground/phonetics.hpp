// include/speechground/phonetics.hpp

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

#ifndef SPEECHGROUND_PHONETICS_HPP_
#define SPEECHGROUND_PHONETICS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speechground/common.hpp"
#include "speechground/matrix.hpp"

namespace speechground {

/// 39 ARPAbet phonemes (stress removed) plus SIL.
const std::vector<std::string> &PhonemeInventory();
/// Throws VocabularyError for unknown symbols.
int PhonemeIndex(std::string_view symbol);

struct PhonemeSeq {
  std::vector<int> ids;  // indices into PhonemeInventory()
  bool operator==(const PhonemeSeq &) const = default;
  std::string ToString() const;
};

/// Directory holding lexicon.tsv, confusions.tsv and phoneme_templates.bin.
/// Taken from $SPEECHGROUND_DATA when set, otherwise the source tree.
std::filesystem::path DataDir();

/// Word -> pronunciation table loaded from `lexicon.tsv`
/// (word <TAB> space-separated phonemes).
class Lexicon {
 public:
  static Lexicon Load(const std::filesystem::path &path);
  /// The shipped lexicon; checked to cover the whole vocabulary.
  static const Lexicon &Default();

  /// Throws VocabularyError for words missing from the table.
  const PhonemeSeq &G2P(std::string_view word) const;
  bool Contains(std::string_view word) const;
  const std::map<std::string, PhonemeSeq, std::less<>> &entries() const { return entries_; }

 private:
  std::map<std::string, PhonemeSeq, std::less<>> entries_;
};

int EditDistance(std::span<const int> a, std::span<const int> b);

/// Levenshtein distance of the pronunciations over the longer length.
double PhoneticDistance(const Lexicon &lexicon, std::string_view a, std::string_view b);
double PhoneticDistance(std::string_view a, std::string_view b);

struct Confusion {
  std::string word;
  double weight = 0.0;
  bool operator==(const Confusion &) const = default;
};

class ConfusionTable {
 public:
  static constexpr double kDefaultLambda = 4.0;
  static constexpr double kDefaultMaxDistance = 2.0 / 3.0;

  /// Every class/attribute/confusable word is paired with the other such
  /// words within `max_distance`, weighted by exp(-lambda * distance).
  static ConfusionTable Build(const Lexicon &lexicon, double lambda = kDefaultLambda,
                              double max_distance = kDefaultMaxDistance);
  static ConfusionTable Load(const std::filesystem::path &path);
  static const ConfusionTable &Default();
  void Save(const std::filesystem::path &path) const;

  void Add(const std::string &word, const std::string &confusable, double weight);
  /// Empty when the word has no confusables.
  std::span<const Confusion> Entries(std::string_view word) const;
  const std::map<std::string, std::vector<Confusion>, std::less<>> &table() const {
    return table_;
  }
  bool operator==(const ConfusionTable &) const = default;

 private:
  std::map<std::string, std::vector<Confusion>, std::less<>> table_;
};

/// Substitution-only transcription noise: every class or attribute token is
/// replaced with probability `error_rate` by a confusable drawn in
/// proportion to the table weights.
std::vector<std::string> CorruptTranscription(std::span<const std::string> tokens,
                                              double error_rate, const ConfusionTable &table,
                                              uint64_t seed);

inline constexpr int kMelChannels = 80;
inline constexpr int kSampleRate = 16000;
inline constexpr int kWindowSamples = 400;
inline constexpr int kHopSamples = 160;
inline constexpr double kMelFloor = 1e-10;

/// 80 x L log-magnitude mel energies.
struct MelSpectrogram {
  Matrix bins;
  int sample_rate = kSampleRate;
  int num_frames() const { return static_cast<int>(bins.cols()); }
};

/// Per-phoneme 80-dim spectral templates (80 x |inventory|).
class PhonemeTemplates {
 public:
  static constexpr uint32_t kMagic = 0x54504753;  // "SGPT"
  static constexpr uint32_t kVersion = 1;
  static constexpr uint64_t kMasterSeed = 20240917;

  static PhonemeTemplates Generate(uint64_t seed = kMasterSeed);
  /// 16-byte header (magic, version, rows, cols as little-endian uint32)
  /// followed by rows*cols little-endian doubles in row-major order.
  static PhonemeTemplates Load(const std::filesystem::path &path);
  static const PhonemeTemplates &Default();
  void Save(const std::filesystem::path &path) const;

  const Matrix &matrix() const { return templates_; }

 private:
  Matrix templates_;
};

/// Concatenated phoneme templates, each held for round(U(3,6)/rate_scale)
/// frames, plus Gaussian noise of standard deviation `noise_level`.
MelSpectrogram SynthSpectrogram(const PhonemeSeq &phonemes, double rate_scale,
                                double noise_level, uint64_t seed,
                                const PhonemeTemplates &templates = PhonemeTemplates::Default());

/// Pronunciations of the tokens, concatenated.
PhonemeSeq UtterancePhonemes(std::span<const std::string> tokens,
                             const Lexicon &lexicon = Lexicon::Default());

/// Center frequencies (Hz) of the 80 triangular filters.
std::vector<double> MelFilterCenters();
double HzToMel(double hz);
double MelToHz(double mel);

/// STFT magnitude (periodic Hann, 400-sample window, 160 hop, no padding)
/// through 80 triangular HTK-mel filters over 0-8000 Hz, natural log
/// clamped at 1e-10. Throws Error when fewer than 400 samples are given.
MelSpectrogram ComputeMelSpectrogram(std::span<const double> waveform);

}  // namespace speechground

#endif  // SPEECHGROUND_PHONETICS_HPP_
