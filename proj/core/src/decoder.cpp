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

#include "wnc/decoder.hpp"

#include <algorithm>

namespace wnc::edit {

int SourceMemory::ext_id(const Vocab& vocab, const std::string& word) const {
  if (vocab.contains(word)) return vocab.id(word);
  for (std::size_t k = 0; k < oovs.size(); ++k) {
    if (oovs[k] == word) return vocab_size + static_cast<int>(k);
  }
  return Vocab::kUnk;
}

std::string SourceMemory::word(const Vocab& vocab, int id) const {
  if (id >= vocab_size) return oovs.at(static_cast<std::size_t>(id - vocab_size));
  return vocab.token(id);
}

SourceMemory map_source(const Vocab& vocab, const std::vector<std::string>& row_tokens) {
  SourceMemory m;
  m.vocab_size = vocab.size();
  for (const auto& w : row_tokens) {
    if (vocab.contains(w)) {
      m.ids.push_back(vocab.id(w));
      m.ext_ids.push_back(vocab.id(w));
      continue;
    }
    m.ids.push_back(Vocab::kUnk);
    auto it = std::find(m.oovs.begin(), m.oovs.end(), w);
    if (it == m.oovs.end()) {
      m.oovs.push_back(w);
      it = m.oovs.end() - 1;
    }
    m.ext_ids.push_back(m.vocab_size + static_cast<int>(it - m.oovs.begin()));
  }
  return m;
}

AttentionDecoder::AttentionDecoder(nn::ParameterSet& ps, const std::string& prefix, const DecoderConfig& cfg,
                                   nn::Parameter* embedding, std::mt19937_64& rng)
    : cfg_(cfg), embedding_(embedding) {
  cell_ = nn::LstmCell(ps, prefix + ".cell", cfg.embed + cfg.hidden, cfg.hidden, rng);
  w_attn_ = &ps.add_uniform(prefix + ".w_attn", {cfg.hidden, cfg.hidden}, nn::kInitRange, rng);
  w_cov_ = &ps.add_uniform(prefix + ".w_cov", {1}, nn::kInitRange, rng);
  out_ = nn::Linear(ps, prefix + ".out", 2 * cfg.hidden, cfg.hidden, rng);
  vocab_proj_ = nn::Linear(ps, prefix + ".vocab", cfg.hidden, cfg.vocab_size, rng);
  gate_ = nn::Linear(ps, prefix + ".gate", 2 * cfg.hidden + cfg.embed, 1, rng);
}

DecoderState AttentionDecoder::initial_state(nn::Graph& g, const nn::LstmState& init,
                                             const SourceMemory& mem) const {
  return {init, g.constant(nn::Tensor({1, cfg_.hidden})), g.constant(nn::Tensor({1, mem.rows()}))};
}

StepOutput AttentionDecoder::step(nn::Graph& g, const DecoderState& state, int prev, const SourceMemory& mem,
                                  real input_dropout, std::optional<real> force_p_gen) const {
  const int in_vocab = prev < cfg_.vocab_size ? prev : Vocab::kUnk;
  Var x = nn::embedding(g.param(*embedding_), {in_vocab});
  Var lstm_in = nn::dropout(nn::concat({x, state.context}, 1), input_dropout);
  nn::LstmState s = cell_.step(g, lstm_in, state.lstm);

  Var scores = nn::matmul_nt(nn::matmul(s.h, g.param(*w_attn_)), mem.states);
  scores = nn::add(scores, nn::mul_scalar(state.coverage, g.param(*w_cov_)));
  Var attn = nn::softmax(scores);
  Var ctx = nn::matmul(attn, mem.states);

  Var hidden = nn::tanh(out_(g, nn::concat({s.h, ctx}, 1)));
  Var p_vocab = nn::softmax(vocab_proj_(g, hidden));
  Var p_gen = force_p_gen ? g.constant(nn::Tensor({1, 1}, *force_p_gen))
                          : nn::sigmoid(gate_(g, nn::concat({ctx, s.h, x}, 1)));

  const int ext = mem.ext_size();
  Var generated = nn::mul_scalar(nn::pad_cols(p_vocab, ext), p_gen);
  Var copied = nn::mul_scalar(nn::scatter_cols(attn, mem.ext_ids, ext), nn::one_minus(p_gen));

  StepOutput out;
  out.distribution = nn::add(generated, copied);
  out.attention = attn;
  out.p_gen = p_gen;
  out.coverage_penalty = nn::sum(nn::minimum(attn, state.coverage));
  out.next = {s, ctx, nn::add(state.coverage, attn)};
  return out;
}

TeacherForced teacher_forced(nn::Graph& g, const AttentionDecoder& dec, const SourceMemory& mem,
                             const nn::LstmState& init, const std::vector<int>& targets,
                             const std::vector<double>& weights, double coverage_weight, real input_dropout) {
  if (targets.size() != weights.size()) {
    throw text::LengthMismatchError("teacher_forced: " + std::to_string(weights.size()) + " weights for " +
                                    std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw std::invalid_argument("teacher_forced: empty target");
  TeacherForced tf;
  DecoderState state = dec.initial_state(g, init, mem);
  std::vector<Var> picked, penalties;
  std::vector<real> w;
  int prev = Vocab::kSos;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    StepOutput o = dec.step(g, state, prev, mem, input_dropout);
    const nn::Tensor& d = o.distribution.value();
    const int best = static_cast<int>(std::max_element(d.data(), d.data() + d.size()) - d.data());
    tf.correct += best == targets[t];
    ++tf.total;
    picked.push_back(nn::gather(o.distribution, {targets[t]}));
    penalties.push_back(o.coverage_penalty);
    w.push_back(static_cast<real>(weights[t]));
    state = o.next;
    prev = targets[t];
  }
  const int m = static_cast<int>(targets.size());
  Var logp = nn::log(nn::reshape(nn::concat(picked, 0), {1, m}), real(1e-12));
  Var weighted = nn::mul(logp, g.constant(nn::Tensor({1, m}, std::move(w))));
  tf.nll = nn::scale(nn::sum(weighted), real(-1));
  tf.coverage = nn::sum(nn::concat(penalties, 1));
  tf.loss = nn::add(tf.nll, nn::scale(tf.coverage, static_cast<real>(coverage_weight)));
  return tf;
}

}  // namespace wnc::edit
