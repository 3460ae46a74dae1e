// Copyright 2026 The WNC Neutralizer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wnc::text {

class EmptyInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LengthMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Token {
  std::string surface;
  std::string norm;  // case-folded surface

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string raw;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<std::string> norms() const;
  // Space-joined normalized tokens.
  std::string joined() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Lowercases, splits punctuation into separate tokens and collapses
// whitespace. Word tokens are runs of letters/digits (non-ASCII bytes count
// as letters) that may contain single internal apostrophes or hyphens.
// Throws EmptyInputError when `raw` is blank.
Sentence tokenize(std::string_view raw);

// Builds a sentence from pre-split tokens (used when reading corpus files).
Sentence from_tokens(const std::vector<std::string>& tokens, std::string raw = {});

// Joins tokens with spaces, without a space before closing punctuation or
// after opening brackets.
std::string detokenize(const std::vector<std::string>& tokens);

std::string to_lower(std::string_view s);
bool is_punctuation_token(std::string_view tok);

// Character-level Levenshtein distance over UTF-8 code points.
std::size_t levenshtein_chars(std::string_view a, std::string_view b);

enum class EditKind { kEqual, kDelete, kInsert, kReplace };

std::string_view to_string(EditKind kind);

struct EditOp {
  EditKind kind;
  std::size_t src_begin, src_end;  // [begin, end) in the source
  std::size_t tgt_begin, tgt_end;  // [begin, end) in the target

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
  std::vector<EditOp> ops;

  // Rebuilds the target token sequence from the source and this script.
  std::vector<std::string> apply(const std::vector<std::string>& src,
                                 const std::vector<std::string>& tgt) const;
  bool has_pure_insertion() const;
};

// LCS diff over normalized tokens. Adjacent delete+insert runs are fused
// into replace ops; consecutive ops of one kind are merged.
EditScript token_diff(const Sentence& s, const Sentence& t);
EditScript token_diff(const std::vector<std::string>& s, const std::vector<std::string>& t);

// 1 for every source position covered by a delete or replace op.
std::vector<int> labels_from_diff(const EditScript& script, std::size_t n);

// True for capitalized, non-sentence-initial tokens (single capital letters
// such as "I" or "A" excluded).
bool is_proper_noun_like(const Token& tok, std::size_t position);

}  // namespace wnc::text
