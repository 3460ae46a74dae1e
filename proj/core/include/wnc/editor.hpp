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

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wnc/checkpoint.hpp"
#include "wnc/config.hpp"
#include "wnc/decoder.hpp"
#include "wnc/training.hpp"

namespace wnc::edit {

// ---- denoising noise model ----------------------------------------------

struct NoiseConfig {
  int k = 3;             // maximum shuffle displacement
  double p_drop = 0.25;  // word-drop probability
};

struct CorruptResult {
  std::vector<std::string> tokens;
  std::vector<int> source_index;  // original position of every output token
};

// Local shuffle (stable sort by i + U[0, k]) followed by independent word
// drop. At least one token always survives.
CorruptResult corrupt(const std::vector<std::string>& x, const NoiseConfig& cfg, std::mt19937_64& rng);

// ---- token-weighted loss --------------------------------------------------

// lambda_i = alpha when target word i does not occur in the source, else 1.
std::vector<double> token_weights(const std::vector<std::string>& source, const std::vector<std::string>& target,
                                  double alpha);

// Value form of the fine-tuning loss over one decoded sequence:
//   -sum_t w_t log p_t + coverage_weight * sum_t sum_j min(a_tj, c_tj)
// where c_t is the sum of the attention maps of earlier steps.
double weighted_loss(const std::vector<double>& target_probs, const std::vector<double>& weights,
                     const std::vector<std::vector<double>>& attentions, double coverage_weight);

// ---- shared sequence-to-sequence interface -------------------------------

enum class MergeRule { kReplace, kMax };
MergeRule parse_merge_rule(std::string_view s);
std::string_view to_string(MergeRule m);

// User-supplied per-token detector override.
struct Control {
  std::vector<double> p;
  MergeRule merge = MergeRule::kReplace;
};

struct Encoded {
  SourceMemory memory;
  nn::LstmState init;
  std::vector<double> probabilities;  // detector output actually used (MODULAR only)
  Var ungated;                        // encoder states before any join (MODULAR only)
};

// Anything that maps a source sentence to decoder memory and decodes it.
class Seq2Seq {
 public:
  virtual ~Seq2Seq() = default;

  virtual const Vocab& vocab() const = 0;
  virtual const RunConfig& run_config() const = 0;
  virtual nn::ParameterSet& params() = 0;
  virtual const AttentionDecoder& decoder() const = 0;
  virtual Encoded encode(nn::Graph& g, const text::Sentence& src, std::string_view category,
                         const Control* control, real dropout) const = 0;
  virtual nn::Checkpoint to_checkpoint() const = 0;
  virtual std::string kind() const = 0;
};

// Teacher-forced weighted loss of (src -> tgt); lambda uses `alpha`.
TeacherForced sequence_loss(nn::Graph& g, const Seq2Seq& model, const text::Sentence& src,
                            std::string_view category, const text::Sentence& tgt, double alpha, real dropout = 0,
                            const Control* control = nullptr);

struct Decoded {
  std::vector<std::string> tokens;
  std::vector<int> ids;  // extended ids
  double log_prob = 0;
  std::vector<double> probabilities;  // detector output used (MODULAR only)
};

// Beam search (width 1 is greedy) with at most n + max_extra_len tokens.
Decoded decode(const Seq2Seq& model, const text::Sentence& src, std::string_view category, int beam_width,
               int max_extra_len, const Control* control = nullptr);

// Search adapter over an encoded source (exposed for tests).
class DecoderSearch {
 public:
  struct State {
    DecoderState dec;
  };

  DecoderSearch(nn::Graph& g, const AttentionDecoder& dec, const Encoded& enc)
      : g_(g), dec_(dec), enc_(enc) {}

  State initial() { return {dec_.initial_state(g_, enc_.init, enc_.memory)}; }
  int start_token() const { return Vocab::kSos; }
  int eos() const { return Vocab::kEos; }
  std::pair<std::vector<double>, State> step(const State& s, int token);

 private:
  nn::Graph& g_;
  const AttentionDecoder& dec_;
  const Encoded& enc_;
};

// ---- bi-LSTM editor ------------------------------------------------------

struct EditorConfig {
  int vocab_size = 0;
  int embed = 64;
  int hidden = 64;
};

struct EncoderOutput {
  Var states;  // [n, h]
  nn::LstmState init;
};

// Shared embedding table, bi-LSTM encoder projected to h, bridges from the
// final encoder states to the decoder's initial state, attentional decoder.
class Editor {
 public:
  Editor() = default;
  Editor(nn::ParameterSet& ps, const std::string& prefix, const EditorConfig& cfg, std::mt19937_64& rng);

  const EditorConfig& config() const { return cfg_; }
  const AttentionDecoder& decoder() const { return decoder_; }
  nn::Parameter* embedding() const { return embedding_; }

  EncoderOutput encode(nn::Graph& g, const std::vector<int>& ids, real input_dropout = 0) const;

 private:
  EditorConfig cfg_;
  nn::Parameter* embedding_ = nullptr;
  nn::BiLstm encoder_;
  nn::Linear project_;
  nn::Linear bridge_h_;
  nn::Linear bridge_c_;
  AttentionDecoder decoder_;
};

EditorConfig editor_config(const RunConfig& cfg, int vocab_size);

// Stand-alone editor (denoising pretraining and plain decoding).
class EditorModel : public Seq2Seq {
 public:
  EditorModel(Vocab vocab, const RunConfig& cfg);
  EditorModel(const EditorModel&) = delete;
  EditorModel& operator=(const EditorModel&) = delete;

  const Vocab& vocab() const override { return vocab_; }
  const RunConfig& run_config() const override { return cfg_; }
  nn::ParameterSet& params() override { return params_; }
  const AttentionDecoder& decoder() const override { return net_.decoder(); }
  Encoded encode(nn::Graph& g, const text::Sentence& src, std::string_view category, const Control* control,
                 real dropout) const override;
  nn::Checkpoint to_checkpoint() const override;
  std::string kind() const override { return "editor"; }

  const Editor& net() const { return net_; }
  static std::unique_ptr<EditorModel> from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  RunConfig cfg_;
  Vocab vocab_;
  nn::ParameterSet params_;
  Editor net_;
};

// ---- training loops -------------------------------------------------------

struct TrainingCurve {
  std::vector<double> losses;  // per optimizer step
  double token_accuracy = 0;   // teacher-forced reconstruction accuracy at the end
};

using StepCallback = std::function<void(int step, const nn::StepResult&)>;

// Denoising autoencoder: reconstruct x from corrupt(x) for `steps` batches.
// Coverage is active. Uses cfg.pretrain_lr.
TrainingCurve pretrain_autoencoder(Seq2Seq& model, const std::vector<text::Sentence>& corpus, int steps,
                                   const NoiseConfig& noise, const StepCallback& on_step = {});

// Teacher-forced argmax accuracy of reconstructing each clean sentence
// from itself (EOS included).
double reconstruction_accuracy(const Seq2Seq& model, const std::vector<text::Sentence>& corpus);

struct ParallelExample {
  text::Sentence source;
  text::Sentence target;
  std::string category;
};

// End-to-end weighted-loss training on (source, target) pairs.
TrainingCurve fine_tune(Seq2Seq& model, const std::vector<ParallelExample>& corpus, int steps,
                        const StepCallback& on_step = {});

}  // namespace wnc::edit
