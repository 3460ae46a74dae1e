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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnc/text.hpp"

namespace wnc::corpus {

struct RevisionPair {
  std::string rev_id;
  std::string category;
  std::string comment;
  std::string pre_text;
  std::string post_text;
};

// Throws std::invalid_argument when a field is missing or not a string.
RevisionPair revision_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RevisionPair& r);

// ---- sentence splitting ---------------------------------------------------

struct SplitOptions {
  // Treat "X." (one letter) as an initial rather than a sentence end.
  bool guard_single_letters = true;
  // Lowercase abbreviations (without the final period) that never end a sentence.
  std::set<std::string> abbreviations = default_abbreviations();

  static std::set<std::string> default_abbreviations();
};

// Splits on . ! ? followed by whitespace and an uppercase letter (optionally
// behind an opening quote or bracket), or by the end of the text. A blank
// line always ends a sentence.
std::vector<text::Sentence> split_sentences(std::string_view doc, const SplitOptions& opts = {});

// ---- alignment ------------------------------------------------------------

struct AlignedPair {
  text::Sentence source;
  text::Sentence target;
  double align_score = 0;
  std::string rev_id;
  std::string category;
  std::optional<text::Sentence> context_prev;
  std::optional<text::Sentence> context_next;
  std::size_t pre_index = 0;
  std::size_t post_index = 0;

  bool changed() const { return source.norms() != target.norms() || source.raw != target.raw; }
};

struct Alignment {
  std::vector<AlignedPair> pairs;     // ordered by pre index
  std::vector<std::size_t> unpaired;  // pre indices left without a partner
};

// Scores every pre sentence against post sentences within +-window with
// sentence BLEU and assigns pairs greedily by descending score (ties: smaller
// |i - j|, then smaller j, then smaller i). Zero scores never pair.
Alignment align_sentences(const std::vector<text::Sentence>& pre, const std::vector<text::Sentence>& post,
                          int window = 5);

// ---- filters --------------------------------------------------------------

enum class RejectRule {
  kMultiSentence,
  kMinEdit,
  kMaxEdit,
  kProperNoun,
  kSpellingGrammar,
  kReferenceHyperlink,
  kNonLiterary,
  kLengthRatio,
  kNoAlignment,
};

std::string_view to_string(RejectRule r);
const std::vector<RejectRule>& all_reject_rules();

enum class EditClass { kSingleWord, kMultiWord };
std::string_view to_string(EditClass c);

struct LabeledPair {
  AlignedPair pair;
  std::vector<int> labels;
  EditClass edit_class = EditClass::kMultiWord;
};

LabeledPair label_pair(const AlignedPair& p);

struct FilterConfig {
  std::size_t min_edit = 4;
  // Correctly spelled words; a replacement inside it whose original is not
  // (and lies within two characters) counts as a spelling fix.
  std::set<std::string> wordlist;
  // Inflection suffixes; swapping one for another on the same stem is a grammar fix.
  std::vector<std::string> suffixes = {"", "s", "es", "ed", "d", "ing"};
};

// Reads one lowercase word per line ('#' starts a comment).
std::set<std::string> load_wordlist(const std::filesystem::path& path);

// Per-pair rules from min-edit through non-literary, first failure wins.
std::optional<RejectRule> check_pair(const LabeledPair& p, const FilterConfig& cfg);

struct Rejection {
  std::string rev_id;
  std::size_t pre_index = 0;
  RejectRule rule;
};

struct FilterResult {
  std::vector<LabeledPair> kept;
  std::vector<Rejection> rejects;
};

// Rejects every pair of the revision when more than one pair changed;
// otherwise applies check_pair to each pair.
FilterResult apply_filters(const RevisionPair& rp, const std::vector<AlignedPair>& aligned,
                           const FilterConfig& cfg);

class TooFewPairsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMinPairsForPercentile = 20;

// max(n, m) / min(n, m) over token counts.
double length_ratio(const AlignedPair& p);

// Nearest-rank percentile of `values` (p in (0, 100]).
double nearest_rank(std::vector<double> values, double p);

// Indices of the pairs whose length ratio does not exceed the nearest-rank
// percentile of the batch. Throws TooFewPairsError below 20 pairs.
std::vector<std::size_t> length_ratio_filter(const std::vector<AlignedPair>& pairs, double percentile = 95);

// ---- corpus build ---------------------------------------------------------

struct CorpusConfig {
  int window = 5;
  double length_percentile = 95;
  std::uint64_t seed = 0;  // echoed in the statistics; the build draws no randomness
  FilterConfig filters;
  SplitOptions split;
};

struct NeutralRecord {
  std::string rev_id;
  std::string category;
  text::Sentence sentence;
};

struct SplitStats {
  std::size_t pairs = 0;
  std::size_t total_words = 0;
  double mean_length = 0;
  double mean_revised_words = 0;
};

struct CorpusStats {
  SplitStats biased_full;
  SplitStats biased_word;
  SplitStats neutral;
  std::map<std::string, std::size_t> rejects;  // by rule name, every rule present
  std::size_t revisions = 0;
  std::size_t malformed = 0;
  bool length_filter_skipped = false;
};

struct CorpusSplits {
  std::vector<LabeledPair> biased_full;
  std::vector<LabeledPair> biased_word;
  std::vector<NeutralRecord> neutral;
  std::vector<Rejection> rejects;
  CorpusStats stats;
};

CorpusSplits build_corpus(const std::vector<RevisionPair>& records, const CorpusConfig& cfg);

// ---- I/O ------------------------------------------------------------------

struct ReadResult {
  std::vector<RevisionPair> records;
  std::size_t malformed = 0;  // unparsable lines, missing fields, duplicate ids
};

ReadResult read_revisions(std::istream& in);
ReadResult read_revisions(const std::filesystem::path& path);

nlohmann::json to_json(const LabeledPair& p);
nlohmann::json to_json(const NeutralRecord& r);
nlohmann::json to_json(const CorpusStats& s, const CorpusConfig& cfg);

// Writes biased_full.jsonl, biased_word.jsonl, neutral.jsonl and stats.json.
void write_corpus(const CorpusSplits& splits, const CorpusConfig& cfg, const std::filesystem::path& out_dir);

// A biased record read back from a corpus file.
struct BiasedRecord {
  std::string rev_id;
  std::string category;
  text::Sentence source;
  text::Sentence target;
  std::vector<int> labels;
};

std::vector<BiasedRecord> read_biased(const std::filesystem::path& path);
std::vector<NeutralRecord> read_neutral(const std::filesystem::path& path);

}  // namespace wnc::corpus
