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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wnc/bleu.hpp"
#include "wnc/corpus.hpp"
#include "wnc/synthetic.hpp"

using namespace wnc;
using namespace wnc::corpus;
namespace fs = std::filesystem;

namespace {

std::vector<text::Sentence> sents(std::initializer_list<const char*> xs) {
  std::vector<text::Sentence> out;
  for (const char* x : xs) out.push_back(text::tokenize(x));
  return out;
}

AlignedPair make_pair(const std::string& src, const std::string& tgt) {
  AlignedPair p;
  p.source = text::tokenize(src);
  p.target = text::tokenize(tgt);
  p.rev_id = "r";
  return p;
}

FilterConfig filters() {
  FilterConfig f;
  f.wordlist = load_wordlist(fs::path(WNC_DATA_DIR) / "wordlist.txt");
  return f;
}

}  // namespace

TEST_CASE("sentence splitting") {
  SplitOptions no_guard;
  no_guard.guard_single_letters = false;
  CHECK(split_sentences("A. B? C!", no_guard).size() == 3);
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("   \n ").empty());

  const auto para = split_sentences(
      "Dr. Smith met J. R. Jones in the U.S. capital. They talked for hours! Did anything come of it? "
      "Nobody knows.");
  REQUIRE(para.size() == 4);
  CHECK(para[0].raw == "Dr. Smith met J. R. Jones in the U.S. capital.");
  CHECK(para[1].raw == "They talked for hours!");
  CHECK(para[3].raw == "Nobody knows.");

  // A blank line always ends a sentence.
  CHECK(split_sentences("first line without stop\n\nsecond line").size() == 2);
}

TEST_CASE("alignment of identical documents is the identity") {
  const auto doc = sents({"The senator spoke.", "He was exposed as corrupt.", "The vote failed."});
  const auto a = align_sentences(doc, doc);
  REQUIRE(a.pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.pairs[i].pre_index == i);
    CHECK(a.pairs[i].post_index == i);
    CHECK(a.pairs[i].align_score == doctest::Approx(1.0));
  }
  CHECK(a.unpaired.empty());
}

TEST_CASE("alignment pairs a single changed sentence with its revision") {
  const auto pre = sents({"The senator spoke at length.", "He was exposed as a corrupt man.", "The vote failed."});
  const auto post = sents({"The senator spoke at length.", "He was described as a corrupt man.", "The vote failed."});
  const auto a = align_sentences(pre, post);
  REQUIRE(a.pairs.size() == 3);
  CHECK(a.pairs[1].post_index == 1);
  CHECK(a.pairs[1].changed());
  CHECK_FALSE(a.pairs[0].changed());
  CHECK_FALSE(a.pairs[2].changed());

  // The chosen partner is the BLEU argmax among candidates.
  for (std::size_t j = 0; j < post.size(); ++j) {
    CHECK(text::sentence_bleu(pre[1], post[j]) <= a.pairs[1].align_score + 1e-12);
  }
}

TEST_CASE("a sentence with no overlap is left unpaired") {
  const auto pre = sents({"Completely unrelated words here.", "The vote failed."});
  const auto post = sents({"The vote failed."});
  const auto a = align_sentences(pre, post);
  CHECK(a.pairs.size() == 1);
  CHECK(a.unpaired == std::vector<std::size_t>{0});
}

TEST_CASE("pair filters") {
  const auto f = filters();
  SUBCASE("identical pair is a min-edit reject") {
    const auto p = label_pair(make_pair("The vote failed.", "The vote failed."));
    CHECK(check_pair(p, f) == RejectRule::kMinEdit);
  }
  SUBCASE("the militants pair is kept") {
    const auto p = label_pair(
        make_pair("Jewish forces overcome Arab militants.", "Jewish forces overcome Arab forces."));
    CHECK_FALSE(check_pair(p, f).has_value());
    CHECK(p.labels == std::vector<int>{0, 0, 0, 0, 1, 0});
    CHECK(p.edit_class == EditClass::kSingleWord);
  }
}

TEST_CASE("two changed sentences reject the whole revision") {
  RevisionPair rp{"r1", "politics", "npov",
                  "The senator spoke at length. He was exposed as corrupt. The vote failed badly.",
                  "The senator talked at length. He was described as corrupt. The vote failed badly."};
  const auto pre = split_sentences(rp.pre_text), post = split_sentences(rp.post_text);
  const auto aligned = align_sentences(pre, post);
  const auto res = apply_filters(rp, aligned.pairs, filters());
  CHECK(res.kept.empty());
  // Every aligned pair of the revision goes, the unchanged one included.
  REQUIRE(res.rejects.size() == aligned.pairs.size());
  for (const auto& r : res.rejects) CHECK(r.rule == RejectRule::kMultiSentence);
}

TEST_CASE("nearest-rank percentile and the length-ratio filter") {
  CHECK(nearest_rank({1, 2, 3, 4}, 50) == 2);
  CHECK(nearest_rank({5, 1, 4, 2, 3}, 100) == 5);

  std::vector<AlignedPair> pairs(100, make_pair("a b c", "a b d"));
  CHECK(length_ratio(pairs[0]) == 1.0);
  CHECK(length_ratio_filter(pairs).size() == 100);

  pairs[37] = make_pair("a", "a b c d e");
  CHECK(length_ratio(pairs[37]) == 5.0);
  const auto kept = length_ratio_filter(pairs);
  CHECK(kept.size() == 99);
  CHECK(std::find(kept.begin(), kept.end(), 37) == kept.end());

  CHECK_THROWS_AS(length_ratio_filter(std::vector<AlignedPair>(19, make_pair("a", "b"))), TooFewPairsError);
}

TEST_CASE("identity revisions produce only neutral sentences") {
  std::vector<RevisionPair> recs;
  for (int i = 0; i < 3; ++i) {
    const std::string doc = "The vote number " + std::to_string(i) + " failed. Everyone went home.";
    recs.push_back({"id" + std::to_string(i), "politics", "npov", doc, doc});
  }
  const auto splits = build_corpus(recs, CorpusConfig{});
  CHECK(splits.biased_full.empty());
  CHECK(splits.biased_word.empty());
  CHECK(splits.neutral.size() == 6);
  CHECK(splits.stats.revisions == 3);
  CHECK(splits.stats.rejects.size() == all_reject_rules().size());
}

TEST_CASE("reading revisions counts malformed lines") {
  std::istringstream in(
      R"({"rev_id":"a","category":"c","comment":"x","pre_text":"A b.","post_text":"A c."})"
      "\n"
      R"({"rev_id":"b","category":"c","pre_text":"A b.","post_text":"A c."})"
      "\n"
      "not json\n"
      R"({"rev_id":"a","category":"c","comment":"x","pre_text":"A b.","post_text":"A c."})"
      "\n\n");
  const auto r = read_revisions(in);
  CHECK(r.records.size() == 1);
  CHECK(r.malformed == 3);
  CHECK_THROWS_AS(revision_from_json(nlohmann::json{{"rev_id", 3}}), std::invalid_argument);
  CHECK(revision_from_json(to_json(r.records[0])).post_text == "A c.");
}

TEST_CASE("written corpus files read back") {
  const auto read = read_revisions(fs::path(WNC_FIXTURES_DIR) / "revisions_20.jsonl");
  CorpusConfig cfg;
  cfg.filters = filters();
  const auto splits = build_corpus(read.records, cfg);
  const auto dir = fs::temp_directory_path() / "wnc_unit_corpus";
  fs::remove_all(dir);
  write_corpus(splits, cfg, dir);
  const auto full = read_biased(dir / "biased_full.jsonl");
  REQUIRE(full.size() == splits.biased_full.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].rev_id == splits.biased_full[i].pair.rev_id);
    CHECK(full[i].source.norms() == splits.biased_full[i].pair.source.norms());
    CHECK(full[i].labels == splits.biased_full[i].labels);
  }
  CHECK(read_neutral(dir / "neutral.jsonl").size() == splits.neutral.size());
  const auto stats = nlohmann::json::parse(std::ifstream(dir / "stats.json"));
  CHECK(stats.contains("biased_full"));
}

TEST_CASE("synthetic corpus") {
  const auto a = synth::generate({});
  const auto b = synth::generate({});
  REQUIRE(a.train.size() == 500);
  REQUIRE(a.test.size() == 200);
  REQUIRE(a.neutral.size() == 600);
  CHECK(a.vocabulary_size() <= 300);
  CHECK(a.categories == std::vector<std::string>{"politics", "sports"});
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    CHECK(a.test[i].source.norms() == b.test[i].source.norms());
    const auto& p = a.test[i];
    CHECK(p.source.norms()[p.marker_index] == p.marker);
    int ones = 0;
    for (int l : p.labels) ones += l;
    CHECK(ones == 1);
    CHECK(p.labels[p.marker_index] == 1);
    // The marker is either replaced in place or deleted.
    auto expected = p.source.norms();
    std::string replacement;
    for (const auto& m : a.markers)
      if (m.word == p.marker) replacement = m.replacement;
    if (replacement.empty()) {
      expected.erase(expected.begin() + static_cast<std::ptrdiff_t>(p.marker_index));
    } else {
      expected[p.marker_index] = replacement;
    }
    CHECK(p.target.norms() == expected);
  }
  synth::SyntheticConfig other;
  other.seed = 8;
  CHECK(synth::generate(other).test[0].source.norms() != a.test[0].source.norms());
}
