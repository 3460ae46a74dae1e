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

#include <random>
#include <string>
#include <vector>

#include "wnc/graph.hpp"

namespace wnc::nn {

// Initialization range for every freshly created weight.
inline constexpr real kInitRange = real(0.1);

struct Linear {
  Parameter* weight = nullptr;  // [in, out]
  Parameter* bias = nullptr;    // [out], optional
  int in = 0;
  int out = 0;

  Linear() = default;
  Linear(ParameterSet& ps, const std::string& name, int in, int out, std::mt19937_64& rng, bool with_bias = true);

  Var operator()(Graph& g, Var x) const;
};

struct LstmState {
  Var h;  // [1, hidden]
  Var c;  // [1, hidden]
};

// Standard LSTM cell: gates = x W_x + h W_h + b, split into input, forget,
// cell and output blocks.
struct LstmCell {
  Parameter* w_x = nullptr;  // [in, 4h]
  Parameter* w_h = nullptr;  // [h, 4h]
  Parameter* b = nullptr;    // [4h]
  int in = 0;
  int hidden = 0;

  LstmCell() = default;
  LstmCell(ParameterSet& ps, const std::string& name, int in, int hidden, std::mt19937_64& rng);

  LstmState zero_state(Graph& g) const;
  // x W_x for a whole [n, in] sequence at once.
  Var project_inputs(Graph& g, Var xs) const;
  LstmState step_projected(Graph& g, Var x_proj_row, const LstmState& prev) const;
  LstmState step(Graph& g, Var x, const LstmState& prev) const;
};

struct BiLstmOutput {
  Var states;          // [n, 2 * hidden], forward | backward per position
  LstmState forward;   // after the last token
  LstmState backward;  // after the first token
};

struct BiLstm {
  LstmCell fwd;
  LstmCell bwd;

  BiLstm() = default;
  BiLstm(ParameterSet& ps, const std::string& name, int in, int hidden, std::mt19937_64& rng);

  // Dropout is applied to the inputs of each LSTM cell in training mode.
  BiLstmOutput encode(Graph& g, Var inputs, real input_dropout = 0) const;
};

struct ContextualEncoderConfig {
  int vocab_size = 0;
  int dim = 64;
  int layers = 2;
  int ffn_dim = 128;
  int max_positions = 256;
  bool use_positions = true;
};

// Small self-attentive encoder (single head per layer, post-norm residual
// blocks) producing one contextual vector per input token.
class ContextualEncoder {
 public:
  ContextualEncoder() = default;
  ContextualEncoder(ParameterSet& ps, const std::string& name, const ContextualEncoderConfig& cfg,
                    std::mt19937_64& rng);

  const ContextualEncoderConfig& config() const { return cfg_; }
  // [n, dim] contextual vectors. Ids beyond the position table are an error.
  Var encode(Graph& g, const std::vector<int>& ids, real dropout = 0) const;
  // Vocabulary logits for masked-token recovery, [n, vocab].
  Var mlm_logits(Graph& g, Var encoded) const;

 private:
  struct Block {
    Linear q, k, v, o;
    Parameter* ln1_gain = nullptr;
    Parameter* ln1_bias = nullptr;
    Linear ff1, ff2;
    Parameter* ln2_gain = nullptr;
    Parameter* ln2_bias = nullptr;
  };

  ContextualEncoderConfig cfg_;
  Parameter* token_embedding_ = nullptr;
  Parameter* position_embedding_ = nullptr;
  std::vector<Block> blocks_;
  Linear mlm_head_;
};

}  // namespace wnc::nn
