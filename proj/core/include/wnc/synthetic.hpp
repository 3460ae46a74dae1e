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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wnc/detector.hpp"
#include "wnc/text.hpp"

namespace wnc::synth {

// A marker word that is biased in exactly one category and maps to a fixed
// neutral replacement (empty = deletion).
struct Marker {
  std::string word;
  std::string category;
  std::string replacement;
};

struct SyntheticPair {
  text::Sentence source;
  text::Sentence target;
  std::vector<int> labels;
  std::string category;
  std::size_t marker_index = 0;  // position of the biased marker in source
  std::string marker;
  bool has_decoy = false;        // a marker of another category is present (kept)
};

struct SyntheticNeutral {
  text::Sentence sentence;
  std::string category;
};

struct SyntheticConfig {
  std::uint64_t seed = 7;
  int train_pairs = 500;
  int test_pairs = 200;
  int neutral_sentences = 600;
  int min_filler = 5;
  int max_filler = 9;
  double decoy_rate = 0.5;
};

struct SyntheticCorpus {
  std::vector<std::string> categories;
  std::vector<Marker> markers;
  std::vector<SyntheticPair> train;
  std::vector<SyntheticPair> test;
  std::vector<SyntheticNeutral> neutral;
  std::vector<detect::Lexicon> lexicons;

  // Every token sequence (sources, targets, neutral) for vocabulary building.
  std::vector<std::vector<std::string>> all_token_lists() const;
  std::size_t vocabulary_size() const;
};

// Each source carries one marker that is biased in its category; half of
// them also carry a decoy marker from another category that stays
// unchanged, so whether a marker must be edited depends on the category.
SyntheticCorpus generate(const SyntheticConfig& cfg);

}  // namespace wnc::synth
