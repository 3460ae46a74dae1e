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

#include "wnc/vocab.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace wnc {

Vocab::Vocab() {
  for (const char* s : {"<pad>", "<unk>", "<s>", "</s>", "<mask>"}) push(s);
  categories_.emplace_back(kUnknownCategory);
  push(category_tag(kUnknownCategory));
}

std::string Vocab::category_tag(std::string_view category) { return "<cat:" + std::string(category) + ">"; }

void Vocab::push(const std::string& token) {
  if (index_.contains(token)) return;
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& corpus, std::size_t max_words,
                   const std::vector<std::string>& categories) {
  Vocab v;
  std::vector<std::string> cats = categories;
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  for (const auto& c : cats) {
    if (c == kUnknownCategory) continue;
    v.categories_.push_back(c);
    v.push(category_tag(c));
  }
  std::map<std::string, std::size_t> freq;
  for (const auto& sent : corpus) {
    for (const auto& tok : sent) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::size_t added = 0;
  for (const auto& [tok, count] : ranked) {
    if (added >= max_words) break;
    if (v.contains(tok)) continue;
    v.push(tok);
    ++added;
  }
  return v;
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return index_.contains(std::string(token)); }

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocab id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

int Vocab::category_id(std::string_view category) const {
  const std::string tag = category_tag(category);
  if (auto it = index_.find(tag); it != index_.end()) return it->second;
  return index_.at(category_tag(kUnknownCategory));
}

nlohmann::json Vocab::to_json() const { return {{"tokens", tokens_}, {"categories", categories_}}; }

Vocab Vocab::from_json(const nlohmann::json& j) {
  Vocab v;
  v.tokens_.clear();
  v.index_.clear();
  for (const auto& t : j.at("tokens")) v.push(t.get<std::string>());
  v.categories_ = j.at("categories").get<std::vector<std::string>>();
  if (v.size() < 6 || v.token(kEos) != "</s>" || v.token(kMask) != "<mask>") {
    throw std::invalid_argument("vocab: serialized table lacks the reserved specials");
  }
  return v;
}

}  // namespace wnc
