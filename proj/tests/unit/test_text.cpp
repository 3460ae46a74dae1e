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

#include <algorithm>
#include <random>

#include "wnc/bleu.hpp"
#include "wnc/config.hpp"
#include "wnc/text.hpp"
#include "wnc/vocab.hpp"

using namespace wnc;
using namespace wnc::text;
using Toks = std::vector<std::string>;

TEST_CASE("tokenize splits punctuation and lowercases") {
  const auto s = tokenize("Go is the deepest game.");
  CHECK(s.norms() == Toks{"go", "is", "the", "deepest", "game", "."});
  CHECK(s.tokens[0].surface == "Go");
  CHECK(s.raw == "Go is the deepest game.");
  CHECK(tokenize("a").norms() == Toks{"a"});

  const auto m = tokenize("Jewish forces overcome Arab militants.");
  REQUIRE(m.size() == 6);
  CHECK(m.norms()[4] == "militants");
  CHECK(m.norms()[5] == ".");
}

TEST_CASE("tokenize keeps internal apostrophes and hyphens") {
  CHECK(tokenize("It's a well-known  fact,  isn't it?").norms() ==
        Toks{"it's", "a", "well-known", "fact", ",", "isn't", "it", "?"});
  CHECK(tokenize("(sic)").norms() == Toks{"(", "sic", ")"});
}

TEST_CASE("tokenize rejects blank input") {
  CHECK_THROWS_AS(tokenize(""), EmptyInputError);
  CHECK_THROWS_AS(tokenize("  \t\n"), EmptyInputError);
}

TEST_CASE("detokenize attaches punctuation") {
  CHECK(detokenize({"go", "is", "the", "deepest", "game", "."}) == "go is the deepest game.");
  CHECK(detokenize({"a", "(", "b", ")", ",", "c"}) == "a (b), c");
  CHECK(detokenize({}).empty());
}

TEST_CASE("levenshtein over characters") {
  CHECK(levenshtein_chars("abc", "abc") == 0);
  CHECK(levenshtein_chars("kitten", "sitting") == 3);
  CHECK(levenshtein_chars("", "abc") == 3);
  CHECK(levenshtein_chars("militants", "forces") == 8);
  // Multi-byte code points count once.
  CHECK(levenshtein_chars("caf\xc3\xa9", "cafe") == 1);
}

// Brute-force edit distance used to cross-check random strings.
static std::size_t dp_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

TEST_CASE("levenshtein matches a table oracle on random ascii") {
  std::mt19937 rng(1);
  for (int t = 0; t < 300; ++t) {
    auto rand_str = [&] {
      std::string s(rng() % 9, 'a');
      for (auto& c : s) c = static_cast<char>('a' + rng() % 3);
      return s;
    };
    const auto a = rand_str(), b = rand_str();
    CHECK(levenshtein_chars(a, b) == dp_distance(a, b));
  }
}

TEST_CASE("token_diff examples") {
  SUBCASE("identity") {
    const auto d = token_diff(Toks{"a", "b", "c"}, Toks{"a", "b", "c"});
    REQUIRE(d.ops.size() == 1);
    CHECK(d.ops[0] == EditOp{EditKind::kEqual, 0, 3, 0, 3});
    CHECK(labels_from_diff(d, 3) == std::vector<int>{0, 0, 0});
  }
  SUBCASE("replace") {
    const auto s = tokenize("Jewish forces overcome Arab militants.");
    const auto t = tokenize("Jewish forces overcome Arab forces.");
    const auto d = token_diff(s, t);
    std::vector<EditOp> changes;
    for (const auto& op : d.ops)
      if (op.kind != EditKind::kEqual) changes.push_back(op);
    REQUIRE(changes.size() == 1);
    CHECK(changes[0] == EditOp{EditKind::kReplace, 4, 5, 4, 5});
    CHECK(labels_from_diff(d, 6) == std::vector<int>{0, 0, 0, 0, 1, 0});
  }
  SUBCASE("delete") {
    const auto d = token_diff(Toks{"a", "b", "c"}, Toks{"a", "c"});
    CHECK(labels_from_diff(d, 3) == std::vector<int>{0, 1, 0});
    CHECK_FALSE(d.has_pure_insertion());
  }
  SUBCASE("insertion") {
    const auto d = token_diff(Toks{"a", "c"}, Toks{"a", "b", "c"});
    CHECK(d.has_pure_insertion());
    CHECK(labels_from_diff(d, 2) == std::vector<int>{0, 0});
  }
}

TEST_CASE("token_diff scripts rebuild the target") {
  std::mt19937 rng(2);
  for (int t = 0; t < 300; ++t) {
    auto seq = [&] {
      Toks s(rng() % 7);
      for (auto& w : s) w = std::string(1, static_cast<char>('a' + rng() % 4));
      return s;
    };
    const auto s = seq(), u = seq();
    const auto d = token_diff(s, u);
    CHECK(d.apply(s, u) == u);
    // Ops tile both sequences.
    std::size_t si = 0, ti = 0;
    for (const auto& op : d.ops) {
      CHECK(op.src_begin == si);
      CHECK(op.tgt_begin == ti);
      si = op.src_end;
      ti = op.tgt_end;
    }
    CHECK(si == s.size());
    CHECK(ti == u.size());
  }
}

TEST_CASE("proper-noun heuristic") {
  const auto s = tokenize("John McCain exposed as the game");
  CHECK(is_proper_noun_like(s.tokens[1], 1));
  CHECK_FALSE(is_proper_noun_like(Token{"The", "the"}, 0));
  CHECK_FALSE(is_proper_noun_like(Token{"game", "game"}, 4));
  CHECK_FALSE(is_proper_noun_like(Token{"I", "i"}, 3));
}

TEST_CASE("sentence bleu") {
  const Toks a{"the", "senator", "was", "described", "as", "corrupt"};
  CHECK(sentence_bleu(a, a) == doctest::Approx(1.0));
  CHECK(sentence_bleu(Toks{"x", "y"}, a) == 0.0);
  CHECK(sentence_bleu(Toks{}, a) == 0.0);
  const double s = sentence_bleu(Toks{"the", "senator", "was", "exposed", "as", "corrupt"}, a);
  CHECK(s > 0.0);
  CHECK(s < 1.0);
}

TEST_CASE("corpus bleu pools counts") {
  using Pairs = std::vector<std::pair<Toks, Toks>>;
  const Toks a{"a", "b", "c", "d"}, b{"e", "f", "g", "h"};
  CHECK(corpus_bleu(Pairs{{a, a}, {b, b}}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(corpus_bleu(Pairs{}), std::invalid_argument);

  // Candidate 1: a b c x vs a b c d. Candidate 2: e f g h vs e f g h.
  // Pooled matches 7/8, 5/6, 3/4, 1/2; equal lengths.
  const double expected = std::pow(7.0 / 8 * 5.0 / 6 * 3.0 / 4 * 1.0 / 2, 0.25);
  CHECK(corpus_bleu(Pairs{{{"a", "b", "c", "x"}, a}, {b, b}}) == doctest::Approx(expected).epsilon(1e-12));

  // A single fully matching pair gives the same value either way.
  CHECK(corpus_bleu(Pairs{{a, a}}) == doctest::Approx(sentence_bleu(a, a)));
}

TEST_CASE("brevity penalty") {
  // Candidate is a prefix of the reference: all precisions 1.
  const Toks ref{"a", "b", "c", "d", "e", "f", "g", "h"};
  const Toks cand{"a", "b", "c", "d"};
  using Pairs = std::vector<std::pair<Toks, Toks>>;
  CHECK(corpus_bleu(Pairs{{cand, ref}}) == doctest::Approx(std::exp(1.0 - 8.0 / 4.0)));
}

TEST_CASE("vocab build orders by frequency then alphabet") {
  const auto v = Vocab::build({{"b", "a", "c"}, {"c", "a"}, {"c"}}, 10, {"politics"});
  CHECK(v.token(Vocab::kPad) == "<pad>");
  CHECK(v.category_id("politics") == 5 + 1);  // after the unknown-category tag
  const int first_word = v.id("c");
  CHECK(v.id("a") == first_word + 1);
  CHECK(v.id("b") == first_word + 2);
  CHECK(v.id("zzz") == Vocab::kUnk);
  CHECK(v.category_id("sports") == v.category_id(Vocab::kUnknownCategory));
  CHECK(v.encode({"a", "q"}) == std::vector<int>{v.id("a"), Vocab::kUnk});

  const auto capped = Vocab::build({{"b", "a", "c"}, {"c", "a"}, {"c"}}, 2, {});
  CHECK(capped.contains("c"));
  CHECK(capped.contains("a"));
  CHECK_FALSE(capped.contains("b"));
}

TEST_CASE("vocab json round trip") {
  const auto v = Vocab::build({{"x", "y"}}, 10, {"sports"});
  const auto back = Vocab::from_json(v.to_json());
  CHECK(back == v);
  CHECK(back.categories() == v.categories());
  CHECK(back.category_id("sports") == v.category_id("sports"));
}

TEST_CASE("run config json round trip and validation") {
  RunConfig c;
  c.hidden = 32;
  c.categories = {"politics"};
  c.mode = "concurrent";
  CHECK(RunConfig::from_json(c.to_json()) == c);

  auto j = c.to_json();
  j["no_such_key"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(j), std::invalid_argument);
  j = c.to_json();
  j["hidden"] = "big";
  CHECK_THROWS_AS(RunConfig::from_json(j), std::invalid_argument);

  RunConfig bad;
  bad.p_drop = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = RunConfig{};
  bad.mode = "bogus";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(RunConfig{}.validate());
}
