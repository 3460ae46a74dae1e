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

#include <cmath>
#include <functional>
#include <map>

#include "wnc/beam.hpp"

using namespace wnc::edit;

namespace {

// Tokens: 0 = EOS, 1 = a, 2 = b. The next-token distribution is a function
// of the whole prefix.
struct PrefixModel {
  using State = std::vector<int>;
  std::function<std::vector<double>(const State&)> probs;
  int calls = 0;

  State initial() const { return {}; }
  int start_token() const { return 3; }
  int eos() const { return 0; }
  std::pair<std::vector<double>, State> step(const State& s, int token) {
    ++calls;
    State next = s;
    if (token != start_token()) next.push_back(token);
    auto p = probs(next);
    for (auto& x : p) x = std::log(x);
    return {p, next};
  }
};

static_assert(SearchModel<PrefixModel>);

// Greedy takes "a" first and never recovers; "b EOS" is the best sequence.
PrefixModel garden_path() {
  return {[](const std::vector<int>& prefix) -> std::vector<double> {
    if (prefix.empty()) return {1e-9, 0.55, 0.45};
    if (prefix == std::vector<int>{1}) return {0.3, 0.35, 0.35};
    if (prefix == std::vector<int>{2}) return {0.9, 0.05, 0.05};
    return {0.5, 0.25, 0.25};
  }};
}

}  // namespace

TEST_CASE("top_k breaks ties toward the lower index") {
  CHECK(detail::top_k({0.1, 0.5, 0.5, 0.2}, 2) == std::vector<int>{1, 2});
  CHECK(detail::top_k({0.3, 0.3, 0.3}, 5) == std::vector<int>{0, 1, 2});
}

TEST_CASE("greedy follows the local argmax") {
  auto m = garden_path();
  const auto g = greedy_decode(m, 10);
  CHECK(g.finished);
  CHECK(g.tokens == std::vector<int>{1, 1});
  CHECK(g.log_prob == doctest::Approx(std::log(0.55 * 0.35 * 0.5)));
}

TEST_CASE("a wider beam recovers the better sequence") {
  auto m = garden_path();
  const auto b = beam_search(m, 2, 10);
  CHECK(b.finished);
  CHECK(b.tokens == std::vector<int>{2});
  CHECK(b.log_prob == doctest::Approx(std::log(0.45 * 0.9)));
}

TEST_CASE("width one is greedy") {
  auto m1 = garden_path();
  auto m2 = garden_path();
  const auto b = beam_search(m1, 1, 10);
  const auto g = greedy_decode(m2, 10);
  CHECK(b.tokens == g.tokens);
  CHECK(b.log_prob == g.log_prob);
}

TEST_CASE("length cap returns the best live hypothesis") {
  PrefixModel m{[](const std::vector<int>&) -> std::vector<double> { return {0.01, 0.7, 0.29}; }};
  // EOS never reaches the top two candidates.
  const auto b = beam_search(m, 2, 4);
  CHECK_FALSE(b.finished);
  CHECK(b.tokens == std::vector<int>{1, 1, 1, 1});
  // With a third slot the immediate EOS finishes, and a finished
  // hypothesis is preferred to any live one at the cap.
  auto m3 = m;
  const auto w3 = beam_search(m3, 3, 4);
  CHECK(w3.finished);
  CHECK(w3.tokens.empty());
  auto m2 = m;
  const auto g = greedy_decode(m2, 4);
  CHECK_FALSE(g.finished);
  CHECK(g.tokens.size() == 4);
}

TEST_CASE("search stops once no live hypothesis can win") {
  // EOS dominates from the first step; later steps are never needed.
  PrefixModel m{[](const std::vector<int>&) -> std::vector<double> { return {0.98, 0.01, 0.01}; }};
  const auto b = beam_search(m, 4, 50);
  CHECK(b.finished);
  CHECK(b.tokens.empty());
  CHECK(m.calls < 10);
}

TEST_CASE("greedy ties go to the lower id") {
  PrefixModel m{[](const std::vector<int>& p) -> std::vector<double> {
    if (p.empty()) return {0.2, 0.4, 0.4};
    return {1.0, 1e-9, 1e-9};
  }};
  CHECK(greedy_decode(m, 5).tokens == std::vector<int>{1});
}
