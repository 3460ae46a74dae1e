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

#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnc/checkpoint.hpp"
#include "wnc/config.hpp"
#include "wnc/layers.hpp"
#include "wnc/text.hpp"
#include "wnc/vocab.hpp"

namespace wnc::detect {

using nn::real;

class LexiconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Lexicon {
  std::string name;
  std::set<std::string> terms;  // normalized (lowercase)

  friend bool operator==(const Lexicon&, const Lexicon&) = default;
};

// One lexicon per regular file in `dir`, named by the file stem, one term
// per line. Sorted by name. Empty files and duplicate stems are errors; an
// empty directory yields an empty set (with a warning).
std::vector<Lexicon> load_lexicons(const std::filesystem::path& dir);

nlohmann::json lexicons_to_json(const std::vector<Lexicon>& lexicons);
std::vector<Lexicon> lexicons_from_json(const nlohmann::json& j);

// Feature layout per token i, for each lexicon l in order:
//   [3l] token i in l, [3l+1] token i-1 in l, [3l+2] token i+1 in l,
// followed by two positional bits: sentence-initial, sentence-final.
int feature_dim(std::size_t num_lexicons);
nn::Tensor extract_features(const text::Sentence& s, const std::vector<Lexicon>& lexicons);

struct DetectorConfig {
  int vocab_size = 0;
  int feature_dim = 2;
  int hidden = 64;  // h: width of e_i
  nn::ContextualEncoderConfig encoder;
};

struct DetectorInput {
  std::vector<int> ids;  // category tag first, then the sentence tokens
  nn::Tensor features;   // [n, f]
};

DetectorInput make_detector_input(const Vocab& vocab, const std::vector<Lexicon>& lexicons,
                                  const text::Sentence& s, std::string_view category);

struct DetectorForward {
  nn::Var logits;         // [n, 1]
  nn::Var probabilities;  // [n, 1], p_i = sigmoid(logit_i)
  nn::Var hidden;         // [n, b]: contextual vectors b_i (category row dropped)
  nn::Var encoded;        // [n + 1, b] including the category row
};

// Per-token subjectivity tagger:
//   p_i = sigmoid(b_i W_b + e_i W_e + bias),   e_i = ReLU(f_i W_in)
// where b_i comes from the contextual encoder run over the category tag
// followed by the sentence.
class Detector {
 public:
  Detector() = default;
  Detector(nn::ParameterSet& ps, const std::string& prefix, const DetectorConfig& cfg, std::mt19937_64& rng);

  const DetectorConfig& config() const { return cfg_; }
  const nn::ContextualEncoder& encoder() const { return encoder_; }

  DetectorForward forward(nn::Graph& g, const DetectorInput& input, real dropout = 0) const;

  nn::Parameter* w_in() const { return w_in_; }
  nn::Parameter* w_b() const { return w_b_; }
  nn::Parameter* w_e() const { return w_e_; }
  nn::Parameter* bias() const { return bias_; }

 private:
  DetectorConfig cfg_;
  nn::ContextualEncoder encoder_;
  nn::Parameter* w_in_ = nullptr;  // [f, h]
  nn::Parameter* w_b_ = nullptr;   // [b, 1]
  nn::Parameter* w_e_ = nullptr;   // [h, 1]
  nn::Parameter* bias_ = nullptr;  // [1]
};

inline constexpr real kProbabilityClip = real(1e-7);

// Average negative log likelihood of binary labels, probabilities clipped
// to [1e-7, 1 - 1e-7].
nn::Var detection_loss(nn::Var probabilities, const std::vector<int>& labels);
double detection_loss(const std::vector<double>& probabilities, const std::vector<int>& labels);

// argmax, ties to the lowest index.
std::size_t select_top_word(const std::vector<double>& p);

// Self-contained detector: parameters, vocabulary and lexicons.
class DetectorModel {
 public:
  DetectorModel(Vocab vocab, std::vector<Lexicon> lexicons, const RunConfig& cfg);
  DetectorModel(const DetectorModel&) = delete;
  DetectorModel& operator=(const DetectorModel&) = delete;
  DetectorModel(DetectorModel&&) = default;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const Detector& net() const { return net_; }
  const Vocab& vocab() const { return vocab_; }
  const std::vector<Lexicon>& lexicons() const { return lexicons_; }
  const RunConfig& run_config() const { return cfg_; }

  std::vector<double> detect(const text::Sentence& s, std::string_view category) const;

  nn::Checkpoint to_checkpoint() const;
  static DetectorModel from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  RunConfig cfg_;
  Vocab vocab_;
  std::vector<Lexicon> lexicons_;
  nn::ParameterSet params_;
  Detector net_;
};

DetectorConfig detector_config(const RunConfig& cfg, int vocab_size, std::size_t num_lexicons);
nn::ContextualEncoderConfig encoder_config(const RunConfig& cfg, int vocab_size);

struct LabeledExample {
  text::Sentence source;
  std::vector<int> labels;
  std::string category;
};

struct DetectorTrainingReport {
  std::vector<double> epoch_losses;  // [0] is the loss before training
};

// Minimizes detection_loss with Adam and clipping for cfg.detector_epochs
// epochs; `on_epoch` runs after each epoch (checkpointing).
DetectorTrainingReport train_detector(DetectorModel& model, const std::vector<LabeledExample>& corpus,
                                      const std::function<void(int epoch, const DetectorModel&)>& on_epoch = {});

struct MlmReport {
  std::vector<double> losses;  // per step
  double recovery_accuracy = 0;
};

// Masked-token pretraining of a contextual encoder. Each batch masks every
// position independently with `mask_prob`; a sentence with no masked
// position is resampled. mask_prob == 0 is rejected.
MlmReport masked_lm_pretrain(nn::ParameterSet& params, const nn::ContextualEncoder& encoder,
                             const std::vector<std::vector<int>>& corpus, double mask_prob, int steps,
                             const RunConfig& cfg);
// Fraction of masked positions recovered (argmax) with a fixed mask seed.
double masked_recovery_accuracy(const nn::ContextualEncoder& encoder, const std::vector<std::vector<int>>& corpus,
                                double mask_prob, std::uint64_t seed);

}  // namespace wnc::detect
