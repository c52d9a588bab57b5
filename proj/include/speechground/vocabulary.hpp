// include/speechground/vocabulary.hpp

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

#ifndef SPEECHGROUND_VOCABULARY_HPP_
#define SPEECHGROUND_VOCABULARY_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speechground/common.hpp"

namespace speechground {

enum class WordKind { kFunction, kClass, kAttribute, kConfusable };

class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// The closed corpus vocabulary. Token ids are dense indices into words();
/// classes and attributes also have their own dense ids (class_id,
/// attribute_id) in the order returned by ClassNames() / AttributeNames().
class Vocabulary {
 public:
  static const Vocabulary &Get();

  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string> &words() const { return words_; }
  const std::string &word(int token) const;

  bool Contains(std::string_view word) const;
  /// Throws VocabularyError for out-of-vocabulary words.
  int TokenId(std::string_view word) const;
  WordKind Kind(int token) const { return kinds_.at(token); }
  bool IsContent(int token) const {
    return kinds_.at(token) == WordKind::kClass ||
           kinds_.at(token) == WordKind::kAttribute;
  }

  int num_classes() const { return static_cast<int>(class_tokens_.size()); }
  int num_attributes() const { return static_cast<int>(attr_tokens_.size()); }
  int ClassToken(int class_id) const { return class_tokens_.at(class_id); }
  int AttributeToken(int attr_id) const { return attr_tokens_.at(attr_id); }
  const std::string &ClassName(int class_id) const;
  const std::string &AttributeName(int attr_id) const;
  /// -1 when the token is not a class word.
  int ClassIdOfToken(int token) const;

  std::vector<int> Encode(std::span<const std::string> tokens) const;
  std::vector<std::string> Decode(std::span<const int> ids) const;

 private:
  Vocabulary();
  std::vector<std::string> words_;
  std::vector<WordKind> kinds_;
  std::vector<int> class_tokens_;
  std::vector<int> attr_tokens_;
};

}  // namespace speechground

#endif  // SPEECHGROUND_VOCABULARY_HPP_
