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

#include "wnc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "wnc/bleu.hpp"

namespace wnc::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

RevisionPair revision_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  auto field = [&](const char* name) -> std::string {
    auto it = j.find(name);
    if (it == j.end() || !it->is_string()) throw std::invalid_argument(std::string("missing string field '") + name + "'");
    return it->get<std::string>();
  };
  return {field("rev_id"), field("category"), field("comment"), field("pre_text"), field("post_text")};
}

json to_json(const RevisionPair& r) {
  return {{"rev_id", r.rev_id},
          {"category", r.category},
          {"comment", r.comment},
          {"pre_text", r.pre_text},
          {"post_text", r.post_text}};
}

// ---- splitting -------------------------------------------------------------

std::set<std::string> SplitOptions::default_abbreviations() {
  return {"mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "gen", "col", "lt", "sgt", "capt", "gov",
          "sen", "rep", "rev", "hon", "vs", "etc", "inc", "ltd", "co", "corp", "no", "vol", "fig", "approx",
          "e.g", "i.e", "u.s", "u.k", "a.m", "p.m", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep",
          "sept", "oct", "nov", "dec", "mt", "ft"};
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

// The word immediately before position `end` (exclusive), lowercased.
std::string word_before(std::string_view doc, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !is_space(doc[b - 1]) && !is_opener(doc[b - 1])) --b;
  return text::to_lower(doc.substr(b, end - b));
}

void push_sentence(std::vector<text::Sentence>& out, std::string_view piece) {
  std::size_t b = 0, e = piece.size();
  while (b < e && is_space(piece[b])) ++b;
  while (e > b && is_space(piece[e - 1])) --e;
  if (b == e) return;
  std::string raw;
  raw.reserve(e - b);
  bool space = false;
  for (std::size_t i = b; i < e; ++i) {
    if (is_space(piece[i])) {
      space = true;
      continue;
    }
    if (space) raw += ' ';
    space = false;
    raw += piece[i];
  }
  text::Sentence s = text::tokenize(raw);
  if (!s.empty()) out.push_back(std::move(s));
}

}  // namespace

std::vector<text::Sentence> split_sentences(std::string_view doc, const SplitOptions& opts) {
  std::vector<text::Sentence> out;
  std::size_t start = 0;
  const std::size_t n = doc.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = doc[i];
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (doc[j] == ' ' || doc[j] == '\t' || doc[j] == '\r')) ++j;
      if (j < n && doc[j] == '\n') {
        push_sentence(out, doc.substr(start, i - start));
        while (j < n && is_space(doc[j])) ++j;
        start = i = j;
        continue;
      }
      ++i;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < n && (doc[end] == '.' || doc[end] == '!' || doc[end] == '?')) ++end;
    while (end < n && is_closer(doc[end])) ++end;

    bool boundary = false;
    if (end == n) {
      boundary = true;
    } else if (is_space(doc[end])) {
      std::size_t k = end;
      while (k < n && is_space(doc[k])) ++k;
      while (k < n && is_opener(doc[k])) ++k;
      boundary = k == n || is_upper(doc[k]);
    }
    if (boundary && c == '.') {
      const std::string w = word_before(doc, i);
      const bool single = w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]));
      if ((single && opts.guard_single_letters) || opts.abbreviations.count(w)) boundary = false;
    }
    if (boundary) {
      push_sentence(out, doc.substr(start, end - start));
      start = end;
    }
    i = end;
  }
  if (start < n) push_sentence(out, doc.substr(start));
  return out;
}

// ---- alignment -------------------------------------------------------------

Alignment align_sentences(const std::vector<text::Sentence>& pre, const std::vector<text::Sentence>& post,
                          int window) {
  if (window < 0) throw std::invalid_argument("alignment window must be non-negative");
  struct Candidate {
    double score;
    std::size_t i, j;
  };
  std::vector<std::vector<std::string>> pre_norms, post_norms;
  for (const auto& s : pre) pre_norms.push_back(s.norms());
  for (const auto& s : post) post_norms.push_back(s.norms());

  std::vector<Candidate> cands;
  const auto w = static_cast<std::ptrdiff_t>(window);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const auto lo = std::max<std::ptrdiff_t>(0, ii - w);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(post.size()) - 1, ii + w);
    for (auto j = lo; j <= hi; ++j) {
      const double s = text::sentence_bleu(pre_norms[i], post_norms[static_cast<std::size_t>(j)]);
      if (s > 0) cands.push_back({s, i, static_cast<std::size_t>(j)});
    }
  }
  auto dist = [](const Candidate& c) { return c.i > c.j ? c.i - c.j : c.j - c.i; };
  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (dist(a) != dist(b)) return dist(a) < dist(b);
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  });

  std::vector<std::optional<std::size_t>> partner(pre.size());
  std::vector<double> score(pre.size(), 0.0);
  std::vector<bool> claimed(post.size(), false);
  for (const auto& c : cands) {
    if (partner[c.i] || claimed[c.j]) continue;
    partner[c.i] = c.j;
    score[c.i] = c.score;
    claimed[c.j] = true;
  }

  Alignment out;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (!partner[i]) {
      out.unpaired.push_back(i);
      continue;
    }
    AlignedPair p;
    p.source = pre[i];
    p.target = post[*partner[i]];
    p.align_score = score[i];
    p.pre_index = i;
    p.post_index = *partner[i];
    if (i > 0) p.context_prev = pre[i - 1];
    if (i + 1 < pre.size()) p.context_next = pre[i + 1];
    out.pairs.push_back(std::move(p));
  }
  return out;
}

// ---- filters ---------------------------------------------------------------

std::string_view to_string(RejectRule r) {
  switch (r) {
    case RejectRule::kMultiSentence: return "multi-sentence";
    case RejectRule::kMinEdit: return "min-edit";
    case RejectRule::kMaxEdit: return "max-edit";
    case RejectRule::kProperNoun: return "proper-noun";
    case RejectRule::kSpellingGrammar: return "spelling-grammar";
    case RejectRule::kReferenceHyperlink: return "reference-hyperlink";
    case RejectRule::kNonLiterary: return "non-literary";
    case RejectRule::kLengthRatio: return "length-ratio";
    case RejectRule::kNoAlignment: return "no-alignment";
  }
  return "?";
}

const std::vector<RejectRule>& all_reject_rules() {
  static const std::vector<RejectRule> rules = {
      RejectRule::kMultiSentence,   RejectRule::kMinEdit,           RejectRule::kMaxEdit,
      RejectRule::kProperNoun,      RejectRule::kSpellingGrammar,   RejectRule::kReferenceHyperlink,
      RejectRule::kNonLiterary,     RejectRule::kLengthRatio,       RejectRule::kNoAlignment};
  return rules;
}

std::string_view to_string(EditClass c) { return c == EditClass::kSingleWord ? "single-word" : "multi-word"; }

LabeledPair label_pair(const AlignedPair& p) {
  LabeledPair out;
  out.pair = p;
  const auto script = text::token_diff(p.source, p.target);
  out.labels = text::labels_from_diff(script, p.source.size());
  int changed = 0;
  for (int l : out.labels) changed += l;
  out.edit_class = changed == 1 && !script.has_pure_insertion() ? EditClass::kSingleWord : EditClass::kMultiWord;
  return out;
}

std::set<std::string> load_wordlist(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::string w;
    while (ss >> w) out.insert(text::to_lower(w));
  }
  return out;
}

namespace {

bool inflection_swap(const std::string& a, const std::string& b, const std::vector<std::string>& suffixes) {
  for (const auto& sa : suffixes) {
    if (a.size() < sa.size() || a.compare(a.size() - sa.size(), sa.size(), sa) != 0) continue;
    const std::string stem = a.substr(0, a.size() - sa.size());
    if (stem.size() < 3) continue;
    for (const auto& sb : suffixes) {
      if (sb != sa && b == stem + sb) return true;
    }
  }
  return false;
}

bool spelling_fix(const std::string& a, const std::string& b, const FilterConfig& cfg) {
  if (inflection_swap(a, b, cfg.suffixes)) return true;
  if (text::levenshtein_chars(a, b) <= 2 && cfg.wordlist.count(b) && !cfg.wordlist.count(a)) return true;
  std::string sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return a != b && sa == sb;  // letters reordered within one token
}

std::size_t count_of(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

const std::vector<std::string_view> kReferencePatterns = {"http://", "https://", "www.",  "<ref",
                                                          "{{cite",  "{{citation", "[http", "[["};
const std::vector<std::string_view> kTableMarkup = {"{|", "||", "|}"};

}  // namespace

std::optional<RejectRule> check_pair(const LabeledPair& lp, const FilterConfig& cfg) {
  const AlignedPair& p = lp.pair;
  const auto src = p.source.norms(), tgt = p.target.norms();
  const auto script = text::token_diff(src, tgt);
  const bool token_change =
      std::any_of(script.ops.begin(), script.ops.end(), [](const auto& op) { return op.kind != text::EditKind::kEqual; });

  if (!token_change || text::levenshtein_chars(p.source.raw, p.target.raw) < cfg.min_edit) return RejectRule::kMinEdit;

  std::size_t changed = 0;
  for (int l : lp.labels) changed += static_cast<std::size_t>(l);
  if (2 * changed > src.size()) return RejectRule::kMaxEdit;

  std::size_t proper = 0;
  for (std::size_t i = 0; i < p.source.size(); ++i) proper += text::is_proper_noun_like(p.source.tokens[i], i);
  if (2 * proper > src.size()) return RejectRule::kProperNoun;

  bool all_spelling = true;
  for (const auto& op : script.ops) {
    if (op.kind == text::EditKind::kEqual) continue;
    if (op.kind != text::EditKind::kReplace || op.src_end - op.src_begin != op.tgt_end - op.tgt_begin) {
      all_spelling = false;
      break;
    }
    for (std::size_t k = 0; k < op.src_end - op.src_begin && all_spelling; ++k) {
      all_spelling = spelling_fix(src[op.src_begin + k], tgt[op.tgt_begin + k], cfg);
    }
    if (!all_spelling) break;
  }
  if (all_spelling) return RejectRule::kSpellingGrammar;

  const std::string src_lower = text::to_lower(p.source.raw), tgt_lower = text::to_lower(p.target.raw);
  for (auto pat : kReferencePatterns) {
    if (count_of(tgt_lower, pat) > count_of(src_lower, pat)) return RejectRule::kReferenceHyperlink;
  }

  for (auto pat : kTableMarkup) {
    if (count_of(p.source.raw, pat) || count_of(p.target.raw, pat)) return RejectRule::kNonLiterary;
  }
  bool punctuation_only = true;
  for (const auto& op : script.ops) {
    if (op.kind == text::EditKind::kEqual) continue;
    for (auto k = op.src_begin; k < op.src_end; ++k) punctuation_only &= text::is_punctuation_token(src[k]);
    for (auto k = op.tgt_begin; k < op.tgt_end; ++k) punctuation_only &= text::is_punctuation_token(tgt[k]);
  }
  if (punctuation_only) return RejectRule::kNonLiterary;
  return std::nullopt;
}

FilterResult apply_filters(const RevisionPair& rp, const std::vector<AlignedPair>& aligned, const FilterConfig& cfg) {
  FilterResult out;
  const auto n_changed = std::count_if(aligned.begin(), aligned.end(), [](const AlignedPair& p) { return p.changed(); });
  if (n_changed > 1) {
    for (const auto& p : aligned) out.rejects.push_back({rp.rev_id, p.pre_index, RejectRule::kMultiSentence});
    return out;
  }
  for (const auto& p : aligned) {
    LabeledPair lp = label_pair(p);
    lp.pair.rev_id = rp.rev_id;
    lp.pair.category = rp.category;
    if (auto rule = check_pair(lp, cfg)) {
      out.rejects.push_back({rp.rev_id, p.pre_index, *rule});
    } else {
      out.kept.push_back(std::move(lp));
    }
  }
  return out;
}

double length_ratio(const AlignedPair& p) {
  const double n = static_cast<double>(p.source.size()), m = static_cast<double>(p.target.size());
  const double lo = std::min(n, m), hi = std::max(n, m);
  if (lo == 0) return hi == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return hi / lo;
}

double nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty list");
  if (!(p > 0 && p <= 100)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<std::size_t> length_ratio_filter(const std::vector<AlignedPair>& pairs, double percentile) {
  if (pairs.size() < kMinPairsForPercentile) {
    throw TooFewPairsError("length-ratio filter needs at least " + std::to_string(kMinPairsForPercentile) +
                           " pairs, got " + std::to_string(pairs.size()));
  }
  std::vector<double> ratios;
  ratios.reserve(pairs.size());
  for (const auto& p : pairs) ratios.push_back(length_ratio(p));
  const double cut = nearest_rank(ratios, percentile);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (ratios[i] <= cut) keep.push_back(i);
  }
  return keep;
}

// ---- build -----------------------------------------------------------------

namespace {

bool has_table_markup(const std::string& raw) {
  return std::any_of(kTableMarkup.begin(), kTableMarkup.end(),
                     [&](std::string_view pat) { return raw.find(pat) != std::string::npos; });
}

template <class Range, class Len, class Revised>
SplitStats stats_of(const Range& items, Len len, Revised revised) {
  SplitStats s;
  s.pairs = items.size();
  double rev = 0;
  for (const auto& it : items) {
    s.total_words += len(it);
    rev += revised(it);
  }
  if (s.pairs) {
    s.mean_length = static_cast<double>(s.total_words) / static_cast<double>(s.pairs);
    s.mean_revised_words = rev / static_cast<double>(s.pairs);
  }
  return s;
}

}  // namespace

CorpusSplits build_corpus(const std::vector<RevisionPair>& records, const CorpusConfig& cfg) {
  CorpusSplits out;
  std::vector<LabeledPair> kept;
  for (const auto& rp : records) {
    const auto pre = split_sentences(rp.pre_text, cfg.split);
    const auto post = split_sentences(rp.post_text, cfg.split);
    Alignment al = align_sentences(pre, post, cfg.window);
    for (auto i : al.unpaired) out.rejects.push_back({rp.rev_id, i, RejectRule::kNoAlignment});
    for (auto& p : al.pairs) {
      p.rev_id = rp.rev_id;
      p.category = rp.category;
    }

    // Neutral: unchanged sentences next to a changed one; every aligned
    // sentence when nothing changed.
    std::set<std::size_t> changed_at;
    for (const auto& p : al.pairs) {
      if (p.changed()) changed_at.insert(p.pre_index);
    }
    for (const auto& p : al.pairs) {
      if (p.changed() || has_table_markup(p.source.raw)) continue;
      const bool adjacent = changed_at.count(p.pre_index + 1) || (p.pre_index > 0 && changed_at.count(p.pre_index - 1));
      if (changed_at.empty() || adjacent) out.neutral.push_back({rp.rev_id, rp.category, p.source});
    }

    FilterResult fr = apply_filters(rp, al.pairs, cfg.filters);
    for (auto& r : fr.rejects) out.rejects.push_back(r);
    for (auto& k : fr.kept) kept.push_back(std::move(k));
  }

  if (kept.size() >= kMinPairsForPercentile) {
    std::vector<AlignedPair> aligned;
    aligned.reserve(kept.size());
    for (const auto& k : kept) aligned.push_back(k.pair);
    const auto keep = length_ratio_filter(aligned, cfg.length_percentile);
    std::vector<bool> keep_mask(kept.size(), false);
    for (auto i : keep) keep_mask[i] = true;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (keep_mask[i]) {
        out.biased_full.push_back(std::move(kept[i]));
      } else {
        out.rejects.push_back({kept[i].pair.rev_id, kept[i].pair.pre_index, RejectRule::kLengthRatio});
      }
    }
  } else {
    if (!kept.empty()) {
      spdlog::warn("length-ratio filter skipped: {} kept pairs, at least {} needed", kept.size(),
                   kMinPairsForPercentile);
    }
    out.stats.length_filter_skipped = true;
    out.biased_full = std::move(kept);
  }
  for (const auto& p : out.biased_full) {
    if (p.edit_class == EditClass::kSingleWord) out.biased_word.push_back(p);
  }

  auto src_len = [](const LabeledPair& p) { return p.pair.source.size(); };
  auto revised = [](const LabeledPair& p) {
    double s = 0;
    for (int l : p.labels) s += l;
    return s;
  };
  out.stats.biased_full = stats_of(out.biased_full, src_len, revised);
  out.stats.biased_word = stats_of(out.biased_word, src_len, revised);
  out.stats.neutral = stats_of(
      out.neutral, [](const NeutralRecord& r) { return r.sentence.size(); }, [](const NeutralRecord&) { return 0.0; });
  for (auto r : all_reject_rules()) out.stats.rejects[std::string(to_string(r))] = 0;
  for (const auto& r : out.rejects) ++out.stats.rejects[std::string(to_string(r.rule))];
  out.stats.revisions = records.size();
  return out;
}

// ---- I/O -------------------------------------------------------------------

ReadResult read_revisions(std::istream& in) {
  ReadResult out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](char c) { return is_space(c); })) continue;
    try {
      RevisionPair rp = revision_from_json(json::parse(line));
      if (!seen.insert(rp.rev_id).second) throw std::invalid_argument("duplicate rev_id '" + rp.rev_id + "'");
      out.records.push_back(std::move(rp));
    } catch (const std::exception& e) {
      spdlog::warn("skipping malformed record on line {}: {}", line_no, e.what());
      ++out.malformed;
    }
  }
  return out;
}

ReadResult read_revisions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open revision file " + path.string());
  return read_revisions(in);
}

json to_json(const LabeledPair& p) {
  return {{"rev_id", p.pair.rev_id},
          {"category", p.pair.category},
          {"src_tokens", p.pair.source.norms()},
          {"tgt_tokens", p.pair.target.norms()},
          {"labels", p.labels},
          {"src_raw", p.pair.source.raw},
          {"tgt_raw", p.pair.target.raw}};
}

json to_json(const NeutralRecord& r) {
  return {{"rev_id", r.rev_id}, {"category", r.category}, {"tokens", r.sentence.norms()}, {"raw", r.sentence.raw}};
}

namespace {

json split_json(const SplitStats& s) {
  return {{"pairs", s.pairs},
          {"total_words", s.total_words},
          {"mean_length", s.mean_length},
          {"mean_revised_words", s.mean_revised_words}};
}

void write_lines(const fs::path& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) out << r.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

json to_json(const CorpusStats& s, const CorpusConfig& cfg) {
  return {{"biased_full", split_json(s.biased_full)},
          {"biased_word", split_json(s.biased_word)},
          {"neutral", split_json(s.neutral)},
          {"rejects", s.rejects},
          {"revisions", s.revisions},
          {"malformed", s.malformed},
          {"length_filter_skipped", s.length_filter_skipped},
          {"config",
           {{"window", cfg.window},
            {"min_edit", cfg.filters.min_edit},
            {"length_percentile", cfg.length_percentile},
            {"seed", cfg.seed}}}};
}

void write_corpus(const CorpusSplits& splits, const CorpusConfig& cfg, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<json> rows;
  for (const auto& p : splits.biased_full) rows.push_back(to_json(p));
  write_lines(out_dir / "biased_full.jsonl", rows);
  rows.clear();
  for (const auto& p : splits.biased_word) rows.push_back(to_json(p));
  write_lines(out_dir / "biased_word.jsonl", rows);
  rows.clear();
  for (const auto& r : splits.neutral) rows.push_back(to_json(r));
  write_lines(out_dir / "neutral.jsonl", rows);

  std::ofstream st(out_dir / "stats.json", std::ios::binary);
  if (!st) throw std::runtime_error("cannot write " + (out_dir / "stats.json").string());
  st << to_json(splits.stats, cfg).dump(2) << '\n';
}

namespace {

template <class F>
void for_each_line(const fs::path& path, F f) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      f(json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<BiasedRecord> read_biased(const fs::path& path) {
  std::vector<BiasedRecord> out;
  for_each_line(path, [&](const json& j) {
    BiasedRecord r;
    r.rev_id = j.at("rev_id").get<std::string>();
    r.category = j.at("category").get<std::string>();
    r.source = text::from_tokens(j.at("src_tokens").get<std::vector<std::string>>(), j.value("src_raw", ""));
    r.target = text::from_tokens(j.at("tgt_tokens").get<std::vector<std::string>>(), j.value("tgt_raw", ""));
    r.labels = j.at("labels").get<std::vector<int>>();
    if (r.labels.size() != r.source.size()) throw std::invalid_argument("labels length differs from source length");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<NeutralRecord> read_neutral(const fs::path& path) {
  std::vector<NeutralRecord> out;
  for_each_line(path, [&](const json& j) {
    out.push_back({j.at("rev_id").get<std::string>(), j.at("category").get<std::string>(),
                   text::from_tokens(j.at("tokens").get<std::vector<std::string>>(), j.value("raw", ""))});
  });
  return out;
}

}  // namespace wnc::corpus
