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

#include <memory>
#include <string>
#include <vector>

#include "wnc/detector.hpp"
#include "wnc/editor.hpp"

namespace wnc::sys {

using nn::real;
using nn::Var;

// h'_i = h_i + p_i * v, with states [n, h], p [n, 1] and v [1, h].
Var join_states(Var states, Var p, Var v);

// Detector output merged with a user control vector.
std::vector<double> merge_control(const std::vector<double>& detector_p, const edit::Control& control);

// Detect-then-edit system. In gate mode the detector probabilities scale a
// learned join vector added to every encoder state; in concat mode the
// (frozen) detector's contextual vectors are concatenated to the encoder
// states and projected back to h.
class ModularSystem : public edit::Seq2Seq {
 public:
  ModularSystem(Vocab vocab, std::vector<detect::Lexicon> lexicons, const RunConfig& cfg);
  ModularSystem(const ModularSystem&) = delete;
  ModularSystem& operator=(const ModularSystem&) = delete;

  const Vocab& vocab() const override { return vocab_; }
  const RunConfig& run_config() const override { return cfg_; }
  nn::ParameterSet& params() override { return params_; }
  const edit::AttentionDecoder& decoder() const override { return editor_.decoder(); }
  edit::Encoded encode(nn::Graph& g, const text::Sentence& src, std::string_view category,
                       const edit::Control* control, real dropout) const override;
  nn::Checkpoint to_checkpoint() const override;
  std::string kind() const override { return "modular"; }

  bool concat_mode() const { return cfg_.join == "concat"; }
  const detect::Detector& detector() const { return detector_; }
  const edit::Editor& editor() const { return editor_; }
  const std::vector<detect::Lexicon>& lexicons() const { return lexicons_; }
  nn::Parameter* join_vector() const { return join_v_; }

  std::vector<double> detect(const text::Sentence& src, std::string_view category) const;

  // Copies pretrained weights in; vocabularies must agree.
  void load_detector(const nn::Checkpoint& ckpt);
  void load_editor(const nn::Checkpoint& ckpt);

  static std::unique_ptr<ModularSystem> from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  RunConfig cfg_;
  Vocab vocab_;
  std::vector<detect::Lexicon> lexicons_;
  nn::ParameterSet params_;
  detect::Detector detector_;
  edit::Editor editor_;
  nn::Parameter* join_v_ = nullptr;  // [1, h], zero at construction
  nn::Linear concat_proj_;           // [h + b -> h], concat mode only
};

// Contextual encoder bridged into the attentional decoder:
//   H = B W_H,  h_0 = mean(B) W_h0,  c_0 = mean(B) W_c0
// where B covers the category tag and the sentence (the tag row stays
// attendable).
class ConcurrentSystem : public edit::Seq2Seq {
 public:
  ConcurrentSystem(Vocab vocab, const RunConfig& cfg, bool use_positions = true);
  ConcurrentSystem(const ConcurrentSystem&) = delete;
  ConcurrentSystem& operator=(const ConcurrentSystem&) = delete;

  const Vocab& vocab() const override { return vocab_; }
  const RunConfig& run_config() const override { return cfg_; }
  nn::ParameterSet& params() override { return params_; }
  const edit::AttentionDecoder& decoder() const override { return decoder_; }
  edit::Encoded encode(nn::Graph& g, const text::Sentence& src, std::string_view category,
                       const edit::Control* control, real dropout) const override;
  nn::Checkpoint to_checkpoint() const override;
  std::string kind() const override { return "concurrent"; }

  const nn::ContextualEncoder& encoder() const { return encoder_; }

  // Initializes the contextual encoder from a detector checkpoint.
  void load_encoder_from_detector(const nn::Checkpoint& ckpt);
  // Loads every weight (e.g. from an autoencoder-pretrained concurrent checkpoint).
  void load_all(const nn::Checkpoint& ckpt);

  static std::unique_ptr<ConcurrentSystem> from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  RunConfig cfg_;
  Vocab vocab_;
  nn::ParameterSet params_;
  nn::ContextualEncoder encoder_;
  nn::Parameter* embedding_ = nullptr;  // decoder input embeddings [V, e]
  nn::Parameter* w_h_ = nullptr;        // [b, h]
  nn::Parameter* w_h0_ = nullptr;       // [b, h]
  nn::Parameter* w_c0_ = nullptr;       // [b, h]
  edit::AttentionDecoder decoder_;
};

// Reads any editing checkpoint (editor, modular, concurrent).
std::unique_ptr<edit::Seq2Seq> load_system(const nn::Checkpoint& ckpt);
std::string checkpoint_kind(const nn::Checkpoint& ckpt);

}  // namespace wnc::sys
