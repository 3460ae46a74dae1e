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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "wnc/bleu.hpp"
#include "wnc/corpus.hpp"
#include "wnc/editor.hpp"
#include "wnc/graph.hpp"
#include "wnc/layers.hpp"
#include "wnc/synthetic.hpp"

using namespace wnc;

namespace {

std::vector<std::string> random_sentence(std::mt19937_64& rng, int n) {
  static const std::vector<std::string> words = {"the", "senator", "was", "exposed", "as", "an", "unprincipled",
                                                 "politician", "who", "voted", "against", "bill", ".", ","};
  std::vector<std::string> s(n);
  for (auto& w : s) w = words[rng() % words.size()];
  return s;
}

void BM_SentenceBleu(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_sentence(rng, static_cast<int>(state.range(0)));
  const auto b = random_sentence(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(text::sentence_bleu(a, b));
}
BENCHMARK(BM_SentenceBleu)->Arg(10)->Arg(30)->Arg(80);

void BM_TokenDiff(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_sentence(rng, static_cast<int>(state.range(0)));
  auto b = a;
  b[b.size() / 2] = "described";
  for (auto _ : state) benchmark::DoNotOptimize(text::token_diff(a, b));
}
BENCHMARK(BM_TokenDiff)->Arg(10)->Arg(30)->Arg(80);

void BM_AlignDocument(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<text::Sentence> pre, post;
  for (int i = 0; i < state.range(0); ++i) {
    auto s = random_sentence(rng, 20);
    pre.push_back(text::from_tokens(s));
    s[5] = "described";
    post.push_back(text::from_tokens(s));
  }
  for (auto _ : state) benchmark::DoNotOptimize(corpus::align_sentences(pre, post));
}
BENCHMARK(BM_AlignDocument)->Arg(10)->Arg(40);

void BM_LstmStep(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  nn::ParameterSet ps;
  nn::LstmCell cell(ps, "c", h, h, rng);
  nn::Tensor x({1, h}, nn::real(0.1));
  for (auto _ : state) {
    nn::Graph g(false);
    auto st = cell.step(g, g.constant(x), cell.zero_state(g));
    benchmark::DoNotOptimize(g.value(st.h).data());
  }
}
BENCHMARK(BM_LstmStep)->Arg(64)->Arg(256);

void BM_EditorDecode(benchmark::State& state) {
  const auto corpus = synth::generate({});
  const auto vocab = Vocab::build(corpus.all_token_lists(), 5000, corpus.categories);
  RunConfig cfg;
  cfg.hidden = 64;
  edit::EditorModel model(vocab, cfg);
  const auto& src = corpus.test[0].source;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edit::decode(model, src, "", static_cast<int>(state.range(0)), 10));
  }
}
BENCHMARK(BM_EditorDecode)->Arg(1)->Arg(4);

void BM_TrainStep(benchmark::State& state) {
  const auto corpus = synth::generate({});
  const auto vocab = Vocab::build(corpus.all_token_lists(), 5000, corpus.categories);
  RunConfig cfg;
  cfg.batch = 16;
  edit::EditorModel model(vocab, cfg);
  std::vector<edit::ParallelExample> data;
  for (const auto& p : corpus.train) data.push_back({p.source, p.target, p.category});
  for (auto _ : state) edit::fine_tune(model, data, 1);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
