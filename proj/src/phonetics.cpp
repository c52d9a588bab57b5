// src/phonetics.cpp

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

#include "speechground/phonetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "speechground/vocabulary.hpp"

namespace speechground {

const std::vector<std::string> &PhonemeInventory() {
  static const std::vector<std::string> kInventory = {
      "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
      "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
      "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
      "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH", "SIL"};
  return kInventory;
}

int PhonemeIndex(std::string_view symbol) {
  const auto &inv = PhonemeInventory();
  auto it = std::find(inv.begin(), inv.end(), symbol);
  if (it == inv.end()) throw VocabularyError("unknown phoneme '" + std::string(symbol) + "'");
  return static_cast<int>(it - inv.begin());
}

std::string PhonemeSeq::ToString() const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += PhonemeInventory().at(ids[i]);
  }
  return out;
}

std::filesystem::path DataDir() {
  if (const char *env = std::getenv("SPEECHGROUND_DATA"); env && *env) return env;
  return SPEECHGROUND_DATA_DIR;
}

Lexicon Lexicon::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path.string());
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string(), lineno, "missing tab");
    std::string word = line.substr(0, tab);
    std::istringstream ps(line.substr(tab + 1));
    PhonemeSeq seq;
    std::string sym;
    try {
      while (ps >> sym) seq.ids.push_back(PhonemeIndex(sym));
    } catch (const Error &e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    if (seq.ids.empty()) throw ParseError(path.string(), lineno, "empty pronunciation");
    lex.entries_[word] = std::move(seq);
  }
  return lex;
}

const Lexicon &Lexicon::Default() {
  static const Lexicon lex = [] {
    Lexicon l = Load(DataDir() / "lexicon.tsv");
    for (const auto &w : Vocabulary::Get().words())
      if (!l.Contains(w)) throw Error("shipped lexicon lacks vocabulary word '" + w + "'");
    return l;
  }();
  return lex;
}

const PhonemeSeq &Lexicon::G2P(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    throw VocabularyError("out-of-vocabulary word '" + std::string(word) + "'");
  return it->second;
}

bool Lexicon::Contains(std::string_view word) const { return entries_.count(word) > 0; }

int EditDistance(std::span<const int> a, std::span<const int> b) {
  std::vector<int> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1 : 0)});
      diag = up;
    }
  }
  return row[b.size()];
}

double PhoneticDistance(const Lexicon &lexicon, std::string_view a, std::string_view b) {
  const auto &pa = lexicon.G2P(a).ids;
  const auto &pb = lexicon.G2P(b).ids;
  size_t longest = std::max(pa.size(), pb.size());
  return static_cast<double>(EditDistance(pa, pb)) / static_cast<double>(longest);
}

double PhoneticDistance(std::string_view a, std::string_view b) {
  return PhoneticDistance(Lexicon::Default(), a, b);
}

ConfusionTable ConfusionTable::Build(const Lexicon &lexicon, double lambda, double max_distance) {
  const Vocabulary &vocab = Vocabulary::Get();
  std::vector<std::string> candidates;
  for (int t = 0; t < vocab.size(); ++t)
    if (vocab.Kind(t) != WordKind::kFunction) candidates.push_back(vocab.word(t));

  ConfusionTable table;
  for (const auto &w : candidates) {
    for (const auto &o : candidates) {
      if (o == w) continue;
      double d = PhoneticDistance(lexicon, w, o);
      if (d <= max_distance + 1e-12) table.Add(w, o, std::exp(-lambda * d));
    }
  }
  return table;
}

void ConfusionTable::Add(const std::string &word, const std::string &confusable, double weight) {
  if (!(weight > 0.0)) throw Error("confusion weights must be positive");
  table_[word].push_back({confusable, weight});
}

std::span<const Confusion> ConfusionTable::Entries(std::string_view word) const {
  auto it = table_.find(word);
  if (it == table_.end()) return {};
  return it->second;
}

ConfusionTable ConfusionTable::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open confusion table " + path.string());
  const Vocabulary &vocab = Vocabulary::Get();
  ConfusionTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word, confusable, weight_text;
    if (!std::getline(ls, word, '\t') || !std::getline(ls, confusable, '\t') ||
        !std::getline(ls, weight_text))
      throw ParseError(path.string(), lineno, "expected word<TAB>confusable<TAB>weight");
    try {
      vocab.TokenId(word);
      vocab.TokenId(confusable);
      table.Add(word, confusable, std::stod(weight_text));
    } catch (const std::exception &e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return table;
}

const ConfusionTable &ConfusionTable::Default() {
  static const ConfusionTable table = Load(DataDir() / "confusions.tsv");
  return table;
}

void ConfusionTable::Save(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# word\tconfusable\tweight\n";
  char buf[64];
  for (const auto &[word, entries] : table_) {
    for (const auto &c : entries) {
      std::snprintf(buf, sizeof(buf), "%.17g", c.weight);
      out << word << '\t' << c.word << '\t' << buf << '\n';
    }
  }
}

std::vector<std::string> CorruptTranscription(std::span<const std::string> tokens,
                                              double error_rate, const ConfusionTable &table,
                                              uint64_t seed) {
  const Vocabulary &vocab = Vocabulary::Get();
  Rng rng(MixSeed(seed, 0xe440));
  std::vector<std::string> out(tokens.begin(), tokens.end());
  for (auto &tok : out) {
    if (!vocab.IsContent(vocab.TokenId(tok))) continue;
    auto entries = table.Entries(tok);
    if (entries.empty()) continue;
    double u = Uniform(rng, 0.0, 1.0);
    double pick = Uniform(rng, 0.0, 1.0);
    if (u >= error_rate) continue;
    double total = 0.0;
    for (const auto &c : entries) total += c.weight;
    double acc = 0.0;
    const std::string *chosen = &entries.back().word;
    for (const auto &c : entries) {
      acc += c.weight / total;
      if (pick < acc) {
        chosen = &c.word;
        break;
      }
    }
    tok = *chosen;
  }
  return out;
}

}  // namespace speechground
