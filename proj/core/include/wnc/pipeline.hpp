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

#include <vector>

#include "wnc/corpus.hpp"
#include "wnc/detector.hpp"
#include "wnc/editor.hpp"
#include "wnc/synthetic.hpp"
#include "wnc/vocab.hpp"

// Glue between corpus records and the training entry points.
namespace wnc::pipeline {

// Vocabulary over sources, targets and neutral sentences; categories are
// collected from the records in first-seen order.
Vocab build_vocab(const std::vector<corpus::BiasedRecord>& biased, const std::vector<corpus::NeutralRecord>& neutral,
                  std::size_t max_words);

std::vector<detect::LabeledExample> labeled_examples(const std::vector<corpus::BiasedRecord>& records);
std::vector<edit::ParallelExample> parallel_examples(const std::vector<corpus::BiasedRecord>& records);
std::vector<text::Sentence> sentences(const std::vector<corpus::NeutralRecord>& records);

// Detector-input id sequences ([category] + words) for masked-token pretraining.
std::vector<std::vector<int>> mlm_corpus(const Vocab& vocab, const std::vector<corpus::NeutralRecord>& records);

std::vector<corpus::BiasedRecord> to_records(const std::vector<synth::SyntheticPair>& pairs, const std::string& prefix);
std::vector<corpus::NeutralRecord> to_records(const std::vector<synth::SyntheticNeutral>& sentences);

}  // namespace wnc::pipeline
