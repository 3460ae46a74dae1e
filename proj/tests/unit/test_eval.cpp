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
#include <random>

#include "wnc/eval.hpp"

using namespace wnc;
using namespace wnc::eval;
using Toks = std::vector<std::string>;

TEST_CASE("exact-match accuracy") {
  const std::vector<Toks> refs = {{"a"}, {"b"}, {"c"}, {"d"}};
  CHECK(exact_match_accuracy(refs, refs) == 1.0);
  CHECK(exact_match_accuracy({{"x"}, {"x"}, {"x"}, {"x"}}, refs) == 0.0);
  CHECK(exact_match_accuracy({{"a"}, {"b"}, {"c"}, {"x"}}, refs) == 0.75);
  CHECK_THROWS_AS(exact_match_accuracy({{"a"}}, refs), std::invalid_argument);
}

TEST_CASE("detection accuracy") {
  const std::vector<std::vector<int>> labels = {{0, 1, 0}, {1, 0}, {0, 0, 0, 1}};
  std::vector<std::vector<double>> oracle, adversarial;
  for (const auto& l : labels) {
    oracle.emplace_back(l.begin(), l.end());
    std::vector<double> a;
    for (int x : l) a.push_back(1.0 - x);
    adversarial.push_back(a);
  }
  CHECK(detection_accuracy(oracle, labels) == 1.0);
  CHECK(detection_accuracy(adversarial, labels) == 0.0);
  CHECK_THROWS(detection_accuracy({{0.5, 0.5}}, {{1, 1}}));
}

TEST_CASE("a uniform detector scores E[1/n]") {
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> probs;
  std::vector<std::vector<int>> labels;
  double expected = 0;
  const int n_pairs = 20000;
  for (int i = 0; i < n_pairs; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    std::vector<int> l(n, 0);
    l[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1;
    labels.push_back(l);
    probs.emplace_back(n, 0.5);
    expected += 1.0 / n;
  }
  expected /= n_pairs;
  CHECK(detection_accuracy(probs, labels) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("bootstrap intervals") {
  SUBCASE("constant metric gives a zero-width interval") {
    const auto ci = bootstrap_mean_ci(std::vector<double>(30, 0.4), 200, 0.95, 1);
    CHECK(ci.low == doctest::Approx(0.4));
    CHECK(ci.high == doctest::Approx(0.4));
  }
  SUBCASE("identical systems straddle zero") {
    std::vector<double> a = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1};
    const auto ci = bootstrap_difference_ci(a, a, 500, 0.95, 2);
    CHECK(ci.low <= 0.0);
    CHECK(ci.high >= 0.0);
  }
  SUBCASE("fixed seed is deterministic") {
    std::vector<double> s = {0.1, 0.9, 0.4, 0.3, 0.8, 0.2};
    const auto a = bootstrap_mean_ci(s, 300, 0.9, 77), b = bootstrap_mean_ci(s, 300, 0.9, 77);
    CHECK(a.low == b.low);
    CHECK(a.high == b.high);
    CHECK(a.level == 0.9);
  }
  SUBCASE("too few examples") {
    CHECK_THROWS_AS(bootstrap_mean_ci({1.0}), std::invalid_argument);
  }
  SUBCASE("generic index metric") {
    std::vector<double> s = {1, 2, 3, 4, 5, 6, 7, 8};
    const auto ci = bootstrap_ci(
        s.size(),
        [&](const std::vector<std::size_t>& idx) {
          double m = 0;
          for (auto i : idx) m = std::max(m, s[i]);
          return m;
        },
        200, 0.95, 3);
    CHECK(ci.low >= 1);
    CHECK(ci.high == 8);
  }
}

TEST_CASE("bootstrap width shrinks with more data") {
  int narrower = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> small(50), large(800);
    for (auto& x : small) x = coin(rng);
    for (auto& x : large) x = coin(rng);
    const auto a = bootstrap_mean_ci(small, 400, 0.95, seed);
    const auto b = bootstrap_mean_ci(large, 400, 0.95, seed);
    narrower += (b.high - b.low) < (a.high - a.low);
  }
  CHECK(narrower == 20);
}

TEST_CASE("bleu bootstrap brackets the point estimate on identical outputs") {
  const std::vector<Toks> refs = {{"a", "b", "c", "d"}, {"e", "f", "g", "h"}, {"i", "j", "k", "l"}};
  const auto ci = bootstrap_bleu_ci(refs, refs, 100, 0.95, 0);
  CHECK(ci.low == doctest::Approx(1.0));
  CHECK(ci.high == doctest::Approx(1.0));
}

TEST_CASE("copy-through scoring and reporting") {
  std::vector<corpus::BiasedRecord> same, changed;
  for (int i = 0; i < 6; ++i) {
    const auto s = text::tokenize("the senator number " + std::to_string(i) + " spoke today");
    same.push_back({"s" + std::to_string(i), "politics", s, s, std::vector<int>(s.size(), 0)});
    auto t = text::tokenize("the senator number " + std::to_string(i) + " talked today");
    std::vector<int> l(s.size(), 0);
    l[4] = 1;
    changed.push_back({"c" + std::to_string(i), "politics", s, t, l});
  }
  EvalConfig cfg;
  cfg.resamples = 100;
  const auto r1 = score("copy", source_copy(same), cfg);
  CHECK(r1.bleu == doctest::Approx(1.0));
  CHECK(r1.accuracy == 1.0);
  CHECK_FALSE(r1.detection_accuracy.has_value());

  const auto examples = source_copy(changed);
  const auto r2 = score("source-copy", examples, cfg);
  CHECK(r2.accuracy == 0.0);
  CHECK(r2.bleu > 0.0);
  CHECK(r2.bleu < 1.0);
  CHECK(r2.bleu_ci.low <= r2.bleu);
  CHECK(r2.bleu <= r2.bleu_ci.high);
  CHECK(r2.n_examples == 6);

  const auto table = format_table({r1, r2});
  CHECK(table.find("source-copy") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "wnc_unit_report.jsonl";
  write_report(path, {r2}, examples);
  std::ifstream in(path);
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("type"));
    ++lines;
  }
  CHECK(lines == 7);
  const auto j = r2.to_json();
  CHECK(j.at("system") == "source-copy");
}
