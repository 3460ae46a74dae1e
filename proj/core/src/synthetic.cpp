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

#include "wnc/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace wnc::synth {

namespace {

const std::vector<std::string> kSubjects = {
    "the council", "the company", "the team",   "the author",  "the museum", "the city",
    "the school",  "the band",    "the agency", "the village", "the court",  "the board",
    "the club",    "the press",   "the studio", "the army",    "the church", "the union"};
const std::vector<std::string> kVerbs = {"built",   "opened",  "moved",    "sold",     "described",
                                         "visited", "started", "released", "reported", "rebuilt",
                                         "joined",  "signed",  "named",    "closed",   "expanded"};
const std::vector<std::string> kObjects = {
    "a bridge",  "the station", "a library", "the harbour", "a garden",  "the road",   "a tower",
    "the album", "a report",    "the plan",  "a school",    "the market", "a stadium", "the canal",
    "a hospital", "the archive", "a theatre", "the factory"};
const std::vector<std::string> kTails = {"in the north", "after the war",  "near the river", "in the spring",
                                         "during the year", "for the region", "in the capital",
                                         "with local funds", "on the coast", "before the vote"};

const std::vector<Marker> kMarkers = {
    {"notorious", "politics", "known"},    {"shamelessly", "politics", ""},
    {"regime", "politics", "government"},  {"heroic", "politics", "active"},
    {"infamous", "politics", "noted"},     {"brazenly", "politics", ""},
    {"legendary", "sports", "former"},     {"unfortunately", "sports", ""},
    {"brilliant", "sports", "recorded"},   {"dominant", "sports", "leading"},
    {"stunning", "sports", "first"},       {"sadly", "sports", ""}};

std::vector<std::string> words_of(const std::string& phrase) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : phrase) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
const T& choose(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

// "<subject> <verb> <object> [<tail>] ."
std::vector<std::string> filler(std::mt19937_64& rng) {
  std::vector<std::string> out = words_of(choose(kSubjects, rng));
  out.push_back(choose(kVerbs, rng));
  for (auto& w : words_of(choose(kObjects, rng))) out.push_back(w);
  if (std::bernoulli_distribution(0.7)(rng)) {
    for (auto& w : words_of(choose(kTails, rng))) out.push_back(w);
  }
  out.push_back(".");
  return out;
}

// Inserts `word` at a random slot before the final period.
std::size_t insert_at(std::vector<std::string>& toks, const std::string& word, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, toks.size() - 1);
  const std::size_t pos = d(rng);
  toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pos), word);
  return pos;
}

text::Sentence sentence_of(const std::vector<std::string>& toks) {
  std::string raw;
  for (const auto& t : toks) {
    if (!raw.empty() && t != ".") raw += ' ';
    raw += t;
  }
  return text::from_tokens(toks, raw);
}

SyntheticPair make_pair(const std::vector<Marker>& markers, const std::string& category, double decoy_rate,
                        std::mt19937_64& rng) {
  std::vector<const Marker*> own, other;
  for (const auto& m : markers) (m.category == category ? own : other).push_back(&m);
  const Marker& biased = *choose(own, rng);

  std::vector<std::string> toks = filler(rng);
  SyntheticPair p;
  p.category = category;
  p.marker = biased.word;
  std::size_t decoy_pos = static_cast<std::size_t>(-1);
  if (std::bernoulli_distribution(decoy_rate)(rng)) {
    decoy_pos = insert_at(toks, choose(other, rng)->word, rng);
    p.has_decoy = true;
  }
  const std::size_t pos = insert_at(toks, biased.word, rng);
  if (p.has_decoy && decoy_pos >= pos) ++decoy_pos;

  std::vector<std::string> tgt = toks;
  if (biased.replacement.empty()) {
    tgt.erase(tgt.begin() + static_cast<std::ptrdiff_t>(pos));
  } else {
    tgt[pos] = biased.replacement;
  }
  p.source = sentence_of(toks);
  p.target = sentence_of(tgt);
  p.marker_index = pos;
  p.labels.assign(toks.size(), 0);
  p.labels[pos] = 1;
  return p;
}

}  // namespace

std::vector<std::vector<std::string>> SyntheticCorpus::all_token_lists() const {
  std::vector<std::vector<std::string>> out;
  for (const auto* split : {&train, &test}) {
    for (const auto& p : *split) {
      out.push_back(p.source.norms());
      out.push_back(p.target.norms());
    }
  }
  for (const auto& n : neutral) out.push_back(n.sentence.norms());
  return out;
}

std::size_t SyntheticCorpus::vocabulary_size() const {
  std::set<std::string> words;
  for (const auto& toks : all_token_lists()) words.insert(toks.begin(), toks.end());
  return words.size();
}

SyntheticCorpus generate(const SyntheticConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  SyntheticCorpus c;
  c.categories = {"politics", "sports"};
  c.markers = kMarkers;

  auto pairs = [&](int count, std::vector<SyntheticPair>& out) {
    for (int i = 0; i < count; ++i) {
      out.push_back(make_pair(c.markers, c.categories[static_cast<std::size_t>(i) % c.categories.size()],
                              cfg.decoy_rate, rng));
    }
  };
  pairs(cfg.train_pairs, c.train);
  pairs(cfg.test_pairs, c.test);

  // Neutral text: fillers, some carrying a marker of the other category
  // (not biased there), plus the neutral replacements.
  for (int i = 0; i < cfg.neutral_sentences; ++i) {
    const std::string& cat = c.categories[static_cast<std::size_t>(i) % c.categories.size()];
    std::vector<std::string> toks = filler(rng);
    const double r = std::uniform_real_distribution<double>(0, 1)(rng);
    if (r < 0.4) {
      std::vector<const Marker*> other;
      for (const auto& m : c.markers) {
        if (m.category != cat) other.push_back(&m);
      }
      insert_at(toks, choose(other, rng)->word, rng);
    } else if (r < 0.7) {
      std::vector<std::string> repl;
      for (const auto& m : c.markers) {
        if (!m.replacement.empty()) repl.push_back(m.replacement);
      }
      insert_at(toks, choose(repl, rng), rng);
    }
    c.neutral.push_back({sentence_of(toks), cat});
  }

  detect::Lexicon subjectives{"subjectives", {}};
  for (const auto& m : c.markers) subjectives.terms.insert(m.word);
  c.lexicons.push_back(std::move(subjectives));
  return c;
}

}  // namespace wnc::synth
