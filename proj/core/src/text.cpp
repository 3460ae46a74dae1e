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

#include "wnc/text.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

namespace wnc::text {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = c;
    if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    }
    if (i + extra >= s.size()) {
      extra = 0;  // truncated sequence: keep the lead byte alone
      cp = c;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_punctuation_token(std::string_view tok) {
  if (tok.empty()) return false;
  return std::none_of(tok.begin(), tok.end(),
                      [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

std::vector<std::string> Sentence::norms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.norm);
  return out;
}

std::string Sentence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].norm;
  }
  return out;
}

Sentence tokenize(std::string_view raw) {
  Sentence s;
  const std::size_t n = raw.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_word_byte(c)) {
      while (j < n) {
        const auto cj = static_cast<unsigned char>(raw[j]);
        if (is_word_byte(cj)) {
          ++j;
        } else if ((cj == '\'' || cj == '-') && j + 1 < n &&
                   is_word_byte(static_cast<unsigned char>(raw[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
    } else {
      j = i + 1;
    }
    std::string surface(raw.substr(i, j - i));
    s.tokens.push_back(Token{surface, to_lower(surface)});
    i = j;
  }
  if (s.tokens.empty()) throw EmptyInputError("tokenize: input is empty or all whitespace");
  // Whitespace-normalized raw text.
  std::string norm_raw;
  bool pending_space = false;
  for (char ch : raw) {
    if (is_space_byte(static_cast<unsigned char>(ch))) {
      pending_space = !norm_raw.empty();
    } else {
      if (pending_space) norm_raw.push_back(' ');
      pending_space = false;
      norm_raw.push_back(ch);
    }
  }
  s.raw = std::move(norm_raw);
  return s;
}

Sentence from_tokens(const std::vector<std::string>& tokens, std::string raw) {
  Sentence s;
  s.tokens.reserve(tokens.size());
  for (const auto& t : tokens) s.tokens.push_back(Token{t, to_lower(t)});
  if (raw.empty()) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) raw.push_back(' ');
      raw += tokens[i];
    }
  }
  s.raw = std::move(raw);
  return s;
}

std::size_t levenshtein_chars(std::string_view a, std::string_view b) {
  const std::u32string x = decode_utf8(a);
  const std::u32string y = decode_utf8(b);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kEqual: return "equal";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
    case EditKind::kReplace: return "replace";
  }
  return "?";
}

std::vector<std::string> EditScript::apply(const std::vector<std::string>& src,
                                           const std::vector<std::string>& tgt) const {
  std::vector<std::string> out;
  for (const auto& op : ops) {
    switch (op.kind) {
      case EditKind::kEqual:
        out.insert(out.end(), src.begin() + op.src_begin, src.begin() + op.src_end);
        break;
      case EditKind::kDelete:
        break;
      case EditKind::kInsert:
      case EditKind::kReplace:
        out.insert(out.end(), tgt.begin() + op.tgt_begin, tgt.begin() + op.tgt_end);
        break;
    }
  }
  return out;
}

bool EditScript::has_pure_insertion() const {
  return std::any_of(ops.begin(), ops.end(),
                     [](const EditOp& op) { return op.kind == EditKind::kInsert; });
}

EditScript token_diff(const std::vector<std::string>& s, const std::vector<std::string>& t) {
  const std::size_t n = s.size(), m = t.size();
  // lcs[i][j] = LCS length of s[i:], t[j:]
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = s[i] == t[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }

  // Unit ops first, then merge.
  std::vector<EditOp> unit;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && s[i] == t[j]) {
      unit.push_back({EditKind::kEqual, i, i + 1, j, j + 1});
      ++i;
      ++j;
    } else if (j == m || (i < n && lcs[i + 1][j] >= lcs[i][j + 1])) {
      unit.push_back({EditKind::kDelete, i, i + 1, j, j});
      ++i;
    } else {
      unit.push_back({EditKind::kInsert, i, i, j, j + 1});
      ++j;
    }
  }

  EditScript script;
  std::size_t k = 0;
  while (k < unit.size()) {
    if (unit[k].kind == EditKind::kEqual) {
      EditOp op = unit[k++];
      while (k < unit.size() && unit[k].kind == EditKind::kEqual) {
        op.src_end = unit[k].src_end;
        op.tgt_end = unit[k].tgt_end;
        ++k;
      }
      script.ops.push_back(op);
      continue;
    }
    // A maximal run of deletes/inserts between equal ops.
    EditOp op = unit[k];
    bool has_del = false, has_ins = false;
    while (k < unit.size() && unit[k].kind != EditKind::kEqual) {
      has_del |= unit[k].kind == EditKind::kDelete;
      has_ins |= unit[k].kind == EditKind::kInsert;
      op.src_end = std::max(op.src_end, unit[k].src_end);
      op.tgt_end = std::max(op.tgt_end, unit[k].tgt_end);
      ++k;
    }
    op.kind = has_del && has_ins ? EditKind::kReplace
              : has_del          ? EditKind::kDelete
                                 : EditKind::kInsert;
    script.ops.push_back(op);
  }
  return script;
}

EditScript token_diff(const Sentence& s, const Sentence& t) { return token_diff(s.norms(), t.norms()); }

std::vector<int> labels_from_diff(const EditScript& script, std::size_t n) {
  std::size_t covered = 0;
  for (const auto& op : script.ops) covered = std::max(covered, op.src_end);
  if (covered != n) {
    throw LengthMismatchError("labels_from_diff: script covers " + std::to_string(covered) +
                              " source tokens, expected " + std::to_string(n));
  }
  std::vector<int> labels(n, 0);
  for (const auto& op : script.ops) {
    if (op.kind == EditKind::kDelete || op.kind == EditKind::kReplace) {
      for (std::size_t i = op.src_begin; i < op.src_end; ++i) labels[i] = 1;
    }
  }
  return labels;
}

bool is_proper_noun_like(const Token& tok, std::size_t position) {
  if (position == 0 || tok.surface.empty()) return false;
  const auto first = static_cast<unsigned char>(tok.surface.front());
  if (!std::isupper(first)) return false;
  if (tok.surface.size() == 1) return false;
  return true;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  static const std::string_view kNoSpaceBefore[] = {".", ",", ";", ":", "!", "?", ")", "]", "}", "%", "'s"};
  static const std::string_view kNoSpaceAfter[] = {"(", "[", "{", "$"};
  std::string out;
  bool glue = true;
  for (const auto& t : tokens) {
    const bool closer = std::find(std::begin(kNoSpaceBefore), std::end(kNoSpaceBefore), t) != std::end(kNoSpaceBefore);
    if (!glue && !closer) out += ' ';
    out += t;
    glue = std::find(std::begin(kNoSpaceAfter), std::end(kNoSpaceAfter), t) != std::end(kNoSpaceAfter);
  }
  return out;
}

}  // namespace wnc::text
