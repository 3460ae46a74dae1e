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

#include <optional>
#include <string>
#include <vector>

#include "wnc/layers.hpp"
#include "wnc/text.hpp"
#include "wnc/vocab.hpp"

namespace wnc::edit {

using nn::real;
using nn::Var;

// Encoder memory plus the extended vocabulary used by the copy pathway.
// Source words missing from the vocabulary get ids vocab_size + k.
struct SourceMemory {
  Var states;                     // [n, h]
  std::vector<int> ids;           // in-vocabulary ids (UNK for OOV), one per row
  std::vector<int> ext_ids;       // extended ids, one per row
  std::vector<std::string> oovs;  // word of extended id vocab_size + k
  int vocab_size = 0;

  int ext_size() const { return vocab_size + static_cast<int>(oovs.size()); }
  int rows() const { return static_cast<int>(ext_ids.size()); }
  // Extended id of `word`: vocabulary id, source OOV slot, or UNK.
  int ext_id(const Vocab& vocab, const std::string& word) const;
  std::string word(const Vocab& vocab, int ext_id) const;
};

// Fills ids/ext_ids/oovs for the given row tokens (states left unset).
SourceMemory map_source(const Vocab& vocab, const std::vector<std::string>& row_tokens);

struct DecoderState {
  nn::LstmState lstm;
  Var context;   // [1, h], attention context from the previous step
  Var coverage;  // [1, n], sum of earlier attention maps
};

struct StepOutput {
  Var distribution;  // [1, ext], final mixture
  Var attention;     // [1, n]
  Var p_gen;         // [1, 1]
  Var coverage_penalty;  // scalar: sum_i min(a_i, coverage_i)
  DecoderState next;
};

struct DecoderConfig {
  int vocab_size = 0;
  int embed = 64;
  int hidden = 64;
};

// LSTM decoder with input feeding, "general" multiplicative attention with a
// coverage feature, and a pointer-generator copy gate.
class AttentionDecoder {
 public:
  AttentionDecoder() = default;
  AttentionDecoder(nn::ParameterSet& ps, const std::string& prefix, const DecoderConfig& cfg,
                   nn::Parameter* embedding, std::mt19937_64& rng);

  const DecoderConfig& config() const { return cfg_; }
  nn::Parameter* embedding() const { return embedding_; }

  DecoderState initial_state(nn::Graph& g, const nn::LstmState& init, const SourceMemory& mem) const;

  // Feeds `prev` (extended id; OOV slots embed as UNK) and returns the next
  // distribution. `force_p_gen` pins the copy gate (tests).
  StepOutput step(nn::Graph& g, const DecoderState& state, int prev, const SourceMemory& mem,
                  real input_dropout = 0, std::optional<real> force_p_gen = std::nullopt) const;

 private:
  DecoderConfig cfg_;
  nn::Parameter* embedding_ = nullptr;  // shared [V, e]
  nn::LstmCell cell_;                   // input e + h
  nn::Parameter* w_attn_ = nullptr;     // [h, h]
  nn::Parameter* w_cov_ = nullptr;      // [1]
  nn::Linear out_;                      // [2h -> h]
  nn::Linear vocab_proj_;               // [h -> V]
  nn::Linear gate_;                     // [2h + e -> 1]
};

struct TeacherForced {
  Var loss;        // scalar: -sum lambda log p + coverage_weight * penalty
  Var nll;         // scalar: -sum lambda log p
  Var coverage;    // scalar: total penalty
  int correct = 0;  // argmax hits over target positions (EOS included)
  int total = 0;
};

// Runs the decoder over `targets` (extended ids, EOS appended by the
// caller) with per-token weights.
TeacherForced teacher_forced(nn::Graph& g, const AttentionDecoder& dec, const SourceMemory& mem,
                             const nn::LstmState& init, const std::vector<int>& targets,
                             const std::vector<double>& weights, double coverage_weight, real input_dropout = 0);

}  // namespace wnc::edit
