// src/vocabulary.cpp

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

#include "speechground/vocabulary.hpp"

#include <algorithm>
#include <array>

namespace speechground {

namespace {

constexpr std::array<const char *, 12> kFunctionWords = {
    "the",  "a",      "there", "is", "next", "to",    "near",
    "beside", "left", "right", "of", "office"};

constexpr std::array<const char *, 8> kClassWords = {
    "chair", "table", "bed", "sofa", "desk", "lamp", "shelf", "door"};

constexpr std::array<const char *, 6> kAttributeWords = {
    "grey", "white", "brown", "black", "red", "blue"};

// Words that never occur in a ground-truth description but can be produced
// by a mis-transcription.
constexpr std::array<const char *, 40> kConfusableWords = {
    "grain", "wide",  "bat",   "cheer", "share", "chore", "four",  "more",
    "cable", "fable", "label", "soda",  "loafer", "disk", "dusk",  "deck",
    "bad",   "bread", "bled",  "bid",   "lamb",  "limp",  "lump",  "self",
    "shell", "elf",   "great", "pray",  "brain", "crown", "round", "wait",
    "why",   "block", "back",  "blank", "glue",  "blow",  "raid",  "rid"};

}  // namespace

const Vocabulary &Vocabulary::Get() {
  static const Vocabulary vocab;
  return vocab;
}

Vocabulary::Vocabulary() {
  auto add = [this](const char *w, WordKind kind) {
    words_.emplace_back(w);
    kinds_.push_back(kind);
    return static_cast<int>(words_.size()) - 1;
  };
  for (const char *w : kFunctionWords) add(w, WordKind::kFunction);
  for (const char *w : kClassWords) class_tokens_.push_back(add(w, WordKind::kClass));
  for (const char *w : kAttributeWords)
    attr_tokens_.push_back(add(w, WordKind::kAttribute));
  for (const char *w : kConfusableWords) add(w, WordKind::kConfusable);
}

const std::string &Vocabulary::word(int token) const {
  if (token < 0 || token >= size())
    throw VocabularyError("token id out of range: " + std::to_string(token));
  return words_[token];
}

bool Vocabulary::Contains(std::string_view word) const {
  return std::find(words_.begin(), words_.end(), word) != words_.end();
}

int Vocabulary::TokenId(std::string_view word) const {
  auto it = std::find(words_.begin(), words_.end(), word);
  if (it == words_.end())
    throw VocabularyError("out-of-vocabulary word '" + std::string(word) + "'");
  return static_cast<int>(it - words_.begin());
}

const std::string &Vocabulary::ClassName(int class_id) const {
  return words_.at(class_tokens_.at(class_id));
}

const std::string &Vocabulary::AttributeName(int attr_id) const {
  return words_.at(attr_tokens_.at(attr_id));
}

int Vocabulary::ClassIdOfToken(int token) const {
  auto it = std::find(class_tokens_.begin(), class_tokens_.end(), token);
  return it == class_tokens_.end() ? -1
                                   : static_cast<int>(it - class_tokens_.begin());
}

std::vector<int> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto &t : tokens) ids.push_back(TokenId(t));
  return ids;
}

std::vector<std::string> Vocabulary::Decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(word(id));
  return out;
}

}  // namespace speechground
