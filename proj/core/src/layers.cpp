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

#include "wnc/layers.hpp"

#include <cmath>

namespace wnc::nn {

Linear::Linear(ParameterSet& ps, const std::string& name, int in_dim, int out_dim, std::mt19937_64& rng,
               bool with_bias)
    : in(in_dim), out(out_dim) {
  weight = &ps.add_uniform(name + ".weight", {in_dim, out_dim}, kInitRange, rng);
  if (with_bias) bias = &ps.add_uniform(name + ".bias", {out_dim}, kInitRange, rng);
}

Var Linear::operator()(Graph& g, Var x) const {
  Var y = matmul(x, g.param(*weight));
  return bias ? add_bias(y, g.param(*bias)) : y;
}

LstmCell::LstmCell(ParameterSet& ps, const std::string& name, int in_dim, int hidden_dim, std::mt19937_64& rng)
    : in(in_dim), hidden(hidden_dim) {
  w_x = &ps.add_uniform(name + ".w_x", {in_dim, 4 * hidden_dim}, kInitRange, rng);
  w_h = &ps.add_uniform(name + ".w_h", {hidden_dim, 4 * hidden_dim}, kInitRange, rng);
  b = &ps.add_uniform(name + ".b", {4 * hidden_dim}, kInitRange, rng);
}

LstmState LstmCell::zero_state(Graph& g) const {
  return {g.constant(Tensor({1, hidden})), g.constant(Tensor({1, hidden}))};
}

Var LstmCell::project_inputs(Graph& g, Var xs) const {
  return add_bias(matmul(xs, g.param(*w_x)), g.param(*b));
}

LstmState LstmCell::step_projected(Graph& g, Var x_proj_row, const LstmState& prev) const {
  Var gates = add(x_proj_row, matmul(prev.h, g.param(*w_h)));
  Var hc = lstm_cell(gates, prev.c);
  return {slice_cols(hc, 0, hidden), slice_cols(hc, hidden, 2 * hidden)};
}

LstmState LstmCell::step(Graph& g, Var x, const LstmState& prev) const {
  return step_projected(g, project_inputs(g, x), prev);
}

BiLstm::BiLstm(ParameterSet& ps, const std::string& name, int in, int hidden, std::mt19937_64& rng)
    : fwd(ps, name + ".fwd", in, hidden, rng), bwd(ps, name + ".bwd", in, hidden, rng) {}

BiLstmOutput BiLstm::encode(Graph& g, Var inputs, real input_dropout) const {
  const int n = inputs.value().rows();
  Var dropped_f = dropout(inputs, input_dropout);
  Var dropped_b = dropout(inputs, input_dropout);
  Var proj_f = fwd.project_inputs(g, dropped_f);
  Var proj_b = bwd.project_inputs(g, dropped_b);

  std::vector<Var> hf(n), hb(n);
  LstmState sf = fwd.zero_state(g);
  for (int t = 0; t < n; ++t) {
    sf = fwd.step_projected(g, slice_rows(proj_f, t, t + 1), sf);
    hf[t] = sf.h;
  }
  LstmState sb = bwd.zero_state(g);
  for (int t = n - 1; t >= 0; --t) {
    sb = bwd.step_projected(g, slice_rows(proj_b, t, t + 1), sb);
    hb[t] = sb.h;
  }
  Var states = concat({concat(hf, 0), concat(hb, 0)}, 1);
  return {states, sf, sb};
}

ContextualEncoder::ContextualEncoder(ParameterSet& ps, const std::string& name, const ContextualEncoderConfig& cfg,
                                     std::mt19937_64& rng)
    : cfg_(cfg) {
  const int d = cfg.dim;
  token_embedding_ = &ps.add_uniform(name + ".token_embedding", {cfg.vocab_size, d}, kInitRange, rng);
  position_embedding_ = &ps.add_uniform(name + ".position_embedding", {cfg.max_positions, d}, kInitRange, rng);
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = name + ".layer" + std::to_string(l);
    Block b;
    b.q = Linear(ps, p + ".q", d, d, rng);
    b.k = Linear(ps, p + ".k", d, d, rng);
    b.v = Linear(ps, p + ".v", d, d, rng);
    b.o = Linear(ps, p + ".o", d, d, rng);
    b.ln1_gain = &ps.add(p + ".ln1.gain", {d});
    b.ln1_gain->value.fill(1);
    b.ln1_bias = &ps.add(p + ".ln1.bias", {d});
    b.ff1 = Linear(ps, p + ".ff1", d, cfg.ffn_dim, rng);
    b.ff2 = Linear(ps, p + ".ff2", cfg.ffn_dim, d, rng);
    b.ln2_gain = &ps.add(p + ".ln2.gain", {d});
    b.ln2_gain->value.fill(1);
    b.ln2_bias = &ps.add(p + ".ln2.bias", {d});
    blocks_.push_back(b);
  }
  mlm_head_ = Linear(ps, name + ".mlm_head", d, cfg.vocab_size, rng);
}

Var ContextualEncoder::encode(Graph& g, const std::vector<int>& ids, real drop) const {
  const int n = static_cast<int>(ids.size());
  if (n == 0) throw ShapeError("contextual encoder: empty input");
  if (n > cfg_.max_positions) {
    throw ShapeError("contextual encoder: sequence of " + std::to_string(n) + " exceeds " +
                     std::to_string(cfg_.max_positions) + " positions");
  }
  Var x = embedding(g.param(*token_embedding_), ids);
  if (cfg_.use_positions) {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = i;
    x = add(x, embedding(g.param(*position_embedding_), pos));
  }
  x = dropout(x, drop);
  const real inv_sqrt = real(1) / std::sqrt(static_cast<real>(cfg_.dim));
  for (const Block& b : blocks_) {
    Var q = b.q(g, x), k = b.k(g, x), v = b.v(g, x);
    Var attn = softmax(scale(matmul_nt(q, k), inv_sqrt));
    Var mixed = b.o(g, matmul(attn, v));
    x = layer_norm(add(x, dropout(mixed, drop)), g.param(*b.ln1_gain), g.param(*b.ln1_bias));
    Var ff = b.ff2(g, relu(b.ff1(g, x)));
    x = layer_norm(add(x, dropout(ff, drop)), g.param(*b.ln2_gain), g.param(*b.ln2_bias));
  }
  return x;
}

Var ContextualEncoder::mlm_logits(Graph& g, Var encoded) const { return mlm_head_(g, encoded); }

}  // namespace wnc::nn
