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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnc/corpus.hpp"
#include "wnc/editor.hpp"

namespace wnc::eval {

using Tokens = std::vector<std::string>;

// Fraction of pairs whose token sequences are identical.
double exact_match_accuracy(const std::vector<Tokens>& outputs, const std::vector<Tokens>& references);

// Fraction of pairs where the top-probability word is labeled 1. Every
// label vector must contain exactly one 1.
double detection_accuracy(const std::vector<std::vector<double>>& probabilities,
                          const std::vector<std::vector<int>>& labels);

struct Interval {
  double low = 0;
  double high = 0;
  double level = 0.95;
};

// Metric evaluated on a resample given as indices into the test set.
using IndexMetric = std::function<double(const std::vector<std::size_t>&)>;

// Percentile bootstrap: `resamples` draws of n indices with replacement,
// bounds at the (1 - level) / 2 and (1 + level) / 2 nearest-rank
// percentiles. Throws std::invalid_argument when n < 2.
Interval bootstrap_ci(std::size_t n, const IndexMetric& metric, int resamples = 1000, double level = 0.95,
                      std::uint64_t seed = 0);

// Mean of per-example scores.
Interval bootstrap_mean_ci(const std::vector<double>& scores, int resamples = 1000, double level = 0.95,
                           std::uint64_t seed = 0);

// Paired difference mean(a) - mean(b), resampling examples jointly.
Interval bootstrap_difference_ci(const std::vector<double>& a, const std::vector<double>& b, int resamples = 1000,
                                 double level = 0.95, std::uint64_t seed = 0);

// Corpus BLEU recomputed on every resample.
Interval bootstrap_bleu_ci(const std::vector<Tokens>& outputs, const std::vector<Tokens>& references,
                           int resamples = 1000, double level = 0.95, std::uint64_t seed = 0);

struct EvalConfig {
  int beam = 4;
  int max_extra_len = 10;
  int resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;

  nlohmann::json to_json() const;
};

struct ExampleResult {
  std::string rev_id;
  std::string category;
  Tokens source;
  Tokens reference;
  Tokens output;
  std::vector<int> labels;
  std::vector<double> probabilities;  // empty when the system has no detector
};

struct EvalReport {
  std::string system;
  double bleu = 0;
  double accuracy = 0;
  std::optional<double> detection_accuracy;
  Interval bleu_ci;
  Interval accuracy_ci;
  std::optional<Interval> detection_ci;
  std::size_t n_examples = 0;
  std::size_t n_detection = 0;  // single-word pairs scored for detection
  nlohmann::json config;

  nlohmann::json to_json() const;
};

// Metrics and intervals over already decoded examples. Detection accuracy
// is reported over examples with probabilities and exactly one label.
EvalReport score(const std::string& system, const std::vector<ExampleResult>& examples, const EvalConfig& cfg);

std::vector<ExampleResult> decode_all(const edit::Seq2Seq& model, const std::vector<corpus::BiasedRecord>& test,
                                      const EvalConfig& cfg);

EvalReport evaluate_system(const edit::Seq2Seq& model, const std::vector<corpus::BiasedRecord>& test,
                           const EvalConfig& cfg, std::vector<ExampleResult>* examples = nullptr);

// Outputs every source unchanged.
std::vector<ExampleResult> source_copy(const std::vector<corpus::BiasedRecord>& test);

// One "example" line per decoded pair followed by one "summary" line per report.
void write_report(const std::filesystem::path& path, const std::vector<EvalReport>& reports,
                  const std::vector<ExampleResult>& examples);

// Fixed-width table; BLEU and accuracies shown x100.
std::string format_table(const std::vector<EvalReport>& reports);

}  // namespace wnc::eval
