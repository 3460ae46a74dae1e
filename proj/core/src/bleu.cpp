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

#include "wnc/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wnc::text {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(const std::vector<std::string>& toks, int order) {
  NgramCounts counts;
  if (static_cast<int>(toks.size()) < order) return counts;
  for (std::size_t i = 0; i + order <= toks.size(); ++i) {
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + order)];
  }
  return counts;
}

double brevity_penalty(double c, double r) {
  if (c <= 0) return 0.0;
  return c > r ? 1.0 : std::exp(1.0 - r / c);
}

double score(const BleuStats& st, bool smooth) {
  const std::size_t max_n = st.matches.size();
  if (st.candidate_length <= 0 || st.totals.empty() || st.matches[0] <= 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t k = 0; k < max_n; ++k) {
    double m = st.matches[k], t = st.totals[k];
    if (smooth && k >= 1) {
      m += 1.0;
      t += 1.0;
    }
    if (t <= 0) continue;  // unsmoothed: candidates shorter than this order
    if (m <= 0) return 0.0;
    log_sum += std::log(m / t);
    ++orders;
  }
  const double bleu = brevity_penalty(st.candidate_length, st.reference_length) *
                      std::exp(log_sum / static_cast<double>(orders));
  return std::clamp(bleu, 0.0, 1.0);
}

}  // namespace

void BleuStats::add(const BleuStats& other) {
  if (matches.empty()) {
    *this = other;
    return;
  }
  for (std::size_t k = 0; k < matches.size(); ++k) {
    matches[k] += other.matches[k];
    totals[k] += other.totals[k];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
}

BleuStats bleu_stats(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference, int max_n) {
  if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
  BleuStats st;
  st.matches.assign(max_n, 0.0);
  st.totals.assign(max_n, 0.0);
  st.candidate_length = static_cast<double>(candidate.size());
  st.reference_length = static_cast<double>(reference.size());
  for (int n = 1; n <= max_n; ++n) {
    const NgramCounts cand = count_ngrams(candidate, n);
    const NgramCounts ref = count_ngrams(reference, n);
    for (const auto& [gram, count] : cand) {
      st.totals[n - 1] += count;
      if (auto it = ref.find(gram); it != ref.end()) st.matches[n - 1] += std::min(count, it->second);
    }
  }
  return st;
}

double sentence_bleu(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference, int max_n) {
  return score(bleu_stats(candidate, reference, max_n), /*smooth=*/true);
}

double sentence_bleu(const Sentence& candidate, const Sentence& reference, int max_n) {
  return sentence_bleu(candidate.norms(), reference.norms(), max_n);
}

double bleu_from_stats(const BleuStats& pooled) { return score(pooled, /*smooth=*/false); }

double corpus_bleu(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs,
                   int max_n) {
  if (pairs.empty()) throw std::invalid_argument("corpus_bleu: empty pair list");
  BleuStats pooled;
  for (const auto& [cand, ref] : pairs) pooled.add(bleu_stats(cand, ref, max_n));
  return score(pooled, /*smooth=*/false);
}

double corpus_bleu(const std::vector<std::pair<Sentence, Sentence>>& pairs, int max_n) {
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> toks;
  toks.reserve(pairs.size());
  for (const auto& [c, r] : pairs) toks.emplace_back(c.norms(), r.norms());
  return corpus_bleu(toks, max_n);
}

}  // namespace wnc::text
