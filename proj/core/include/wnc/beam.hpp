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

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wnc::edit {

// A decoding model for search:
//   using State = ...;
//   State initial();
//   int start_token();
//   int eos();
//   // log-probabilities of every next token after feeding `token`
//   std::pair<std::vector<double>, State> step(const State& s, int token);
template <class Model>
concept SearchModel = requires(Model m, const typename Model::State& s, int tok) {
  { m.initial() } -> std::convertible_to<typename Model::State>;
  { m.start_token() } -> std::convertible_to<int>;
  { m.eos() } -> std::convertible_to<int>;
  { m.step(s, tok) } -> std::convertible_to<std::pair<std::vector<double>, typename Model::State>>;
};

template <class State>
struct Hypothesis {
  std::vector<int> tokens;  // without the terminating EOS
  double log_prob = 0;
  State state;
  bool finished = false;
  std::size_t finish_order = 0;  // completion rank among finished hypotheses
};

namespace detail {

// Indices of the `k` largest entries, ties broken by lower index.
inline std::vector<int> top_k(const std::vector<double>& v, std::size_t k) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), [&](int a, int b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  });
  idx.resize(k);
  return idx;
}

}  // namespace detail

// Greedy decoding: most probable token each step (ties to the lower id),
// until EOS or `max_len` emitted tokens.
template <SearchModel Model>
Hypothesis<typename Model::State> greedy_decode(Model& model, std::size_t max_len) {
  Hypothesis<typename Model::State> h{{}, 0.0, model.initial(), false, 0};
  int prev = model.start_token();
  for (std::size_t t = 0; t < max_len; ++t) {
    auto [logp, next] = model.step(h.state, prev);
    const int best = detail::top_k(logp, 1).front();
    h.log_prob += logp[best];
    h.state = std::move(next);
    if (best == model.eos()) {
      h.finished = true;
      return h;
    }
    h.tokens.push_back(best);
    prev = best;
  }
  return h;
}

// Length-capped beam search without length normalization. Each live
// hypothesis proposes its `width` best continuations; the best `width`
// candidates overall survive (ties: earlier parent, then lower token id).
// EOS candidates are frozen. The result is the highest-scoring finished
// hypothesis (ties: earliest completion), or the best live one when none
// finished within `max_len` tokens.
template <SearchModel Model>
Hypothesis<typename Model::State> beam_search(Model& model, std::size_t width, std::size_t max_len) {
  using H = Hypothesis<typename Model::State>;
  if (width == 0) throw std::invalid_argument("beam_search: width must be >= 1");

  std::vector<H> live{H{{}, 0.0, model.initial(), false, 0}};
  std::vector<H> finished;

  struct Candidate {
    double score;
    std::size_t parent;
    int token;
  };

  for (std::size_t t = 0; t < max_len && !live.empty(); ++t) {
    std::vector<Candidate> cands;
    std::vector<typename Model::State> next_states;
    next_states.reserve(live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      const int prev = live[i].tokens.empty() ? model.start_token() : live[i].tokens.back();
      auto [logp, next] = model.step(live[i].state, prev);
      next_states.push_back(std::move(next));
      for (int tok : detail::top_k(logp, width)) cands.push_back({live[i].log_prob + logp[tok], i, tok});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    });
    if (cands.size() > width) cands.resize(width);

    std::vector<H> survivors;
    for (const Candidate& c : cands) {
      H h{live[c.parent].tokens, c.score, next_states[c.parent], false, 0};
      if (c.token == model.eos()) {
        h.finished = true;
        h.finish_order = finished.size();
        finished.push_back(std::move(h));
      } else {
        h.tokens.push_back(c.token);
        survivors.push_back(std::move(h));
      }
    }
    live = std::move(survivors);

    // Scores never increase, so no live hypothesis can overtake a finished
    // one that already scores at least as well.
    if (!finished.empty() && !live.empty()) {
      double best_finished = finished.front().log_prob;
      for (const H& f : finished) best_finished = std::max(best_finished, f.log_prob);
      if (best_finished >= live.front().log_prob) break;
    }
  }

  const std::vector<H>& pool = finished.empty() ? live : finished;
  if (pool.empty()) throw std::logic_error("beam_search: no hypotheses");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (pool[i].log_prob > pool[best].log_prob) best = i;
  }
  return pool[best];
}

}  // namespace wnc::edit
