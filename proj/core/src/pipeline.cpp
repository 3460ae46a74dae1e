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

#include "wnc/pipeline.hpp"

#include <algorithm>

namespace wnc::pipeline {

Vocab build_vocab(const std::vector<corpus::BiasedRecord>& biased, const std::vector<corpus::NeutralRecord>& neutral,
                  std::size_t max_words) {
  std::vector<std::vector<std::string>> lists;
  std::vector<std::string> categories;
  auto see = [&](const std::string& c) {
    if (std::find(categories.begin(), categories.end(), c) == categories.end()) categories.push_back(c);
  };
  for (const auto& r : biased) {
    lists.push_back(r.source.norms());
    lists.push_back(r.target.norms());
    see(r.category);
  }
  for (const auto& r : neutral) {
    lists.push_back(r.sentence.norms());
    see(r.category);
  }
  return Vocab::build(lists, max_words, categories);
}

std::vector<detect::LabeledExample> labeled_examples(const std::vector<corpus::BiasedRecord>& records) {
  std::vector<detect::LabeledExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.source, r.labels, r.category});
  return out;
}

std::vector<edit::ParallelExample> parallel_examples(const std::vector<corpus::BiasedRecord>& records) {
  std::vector<edit::ParallelExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.source, r.target, r.category});
  return out;
}

std::vector<text::Sentence> sentences(const std::vector<corpus::NeutralRecord>& records) {
  std::vector<text::Sentence> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.sentence);
  return out;
}

std::vector<std::vector<int>> mlm_corpus(const Vocab& vocab, const std::vector<corpus::NeutralRecord>& records) {
  std::vector<std::vector<int>> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    std::vector<int> ids{vocab.category_id(r.category)};
    for (int id : vocab.encode(r.sentence.norms())) ids.push_back(id);
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<corpus::BiasedRecord> to_records(const std::vector<synth::SyntheticPair>& pairs, const std::string& prefix) {
  std::vector<corpus::BiasedRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    out.push_back({prefix + std::to_string(i), p.category, p.source, p.target, p.labels});
  }
  return out;
}

std::vector<corpus::NeutralRecord> to_records(const std::vector<synth::SyntheticNeutral>& sentences) {
  std::vector<corpus::NeutralRecord> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out.push_back({"n" + std::to_string(i), sentences[i].category, sentences[i].sentence});
  }
  return out;
}

}  // namespace wnc::pipeline
