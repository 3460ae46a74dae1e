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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace wnc {

// Token <-> id table shared by every model in a run. Ids 0..4 are the
// specials; category tags follow, then words by descending frequency.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kSos = 2;
  static constexpr int kEos = 3;
  static constexpr int kMask = 4;
  static constexpr std::string_view kUnknownCategory = "unknown";

  Vocab();

  // Words seen in `corpus`, most frequent first (ties alphabetical), capped
  // at `max_words` entries beyond the specials and category tags.
  static Vocab build(const std::vector<std::vector<std::string>>& corpus, std::size_t max_words,
                     const std::vector<std::string>& categories);

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  // Id of the "<cat:...>" tag; unconfigured categories share the unknown tag.
  int category_id(std::string_view category) const;
  const std::vector<std::string>& categories() const { return categories_; }
  static std::string category_tag(std::string_view category);

  nlohmann::json to_json() const;
  static Vocab from_json(const nlohmann::json& j);

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  void push(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> categories_;
};

}  // namespace wnc
