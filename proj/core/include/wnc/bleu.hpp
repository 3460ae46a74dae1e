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
#include <utility>
#include <vector>

#include "wnc/text.hpp"

namespace wnc::text {

// Clipped n-gram statistics for one candidate/reference pair.
struct BleuStats {
  std::vector<double> matches;  // per order 1..max_n
  std::vector<double> totals;   // candidate n-gram counts per order
  double candidate_length = 0;
  double reference_length = 0;

  void add(const BleuStats& other);
};

BleuStats bleu_stats(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference, int max_n = 4);

// Sentence BLEU with add-one smoothing on orders >= 2. Returns a value in [0, 1].
double sentence_bleu(const Sentence& candidate, const Sentence& reference, int max_n = 4);
double sentence_bleu(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference, int max_n = 4);

// Unsmoothed BLEU of pooled statistics (what corpus_bleu computes).
double bleu_from_stats(const BleuStats& pooled);

// Corpus BLEU: counts and lengths pooled over all pairs, no smoothing.
// Throws std::invalid_argument on an empty list.
double corpus_bleu(const std::vector<std::pair<Sentence, Sentence>>& pairs, int max_n = 4);
double corpus_bleu(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs,
                   int max_n = 4);

}  // namespace wnc::text
