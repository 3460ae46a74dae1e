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

#include "wnc/editor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "wnc/beam.hpp"

namespace wnc::edit {

CorruptResult corrupt(const std::vector<std::string>& x, const NoiseConfig& cfg, std::mt19937_64& rng) {
  if (cfg.k < 0) throw std::invalid_argument("corrupt: k must be >= 0");
  if (cfg.p_drop < 0 || cfg.p_drop >= 1) throw std::invalid_argument("corrupt: p_drop must be in [0, 1)");
  CorruptResult out;
  const std::size_t n = x.size();
  if (n == 0) return out;

  std::uniform_real_distribution<double> jitter(0.0, static_cast<double>(cfg.k));
  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = static_cast<double>(i) + (cfg.k > 0 ? jitter(rng) : 0.0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });

  std::bernoulli_distribution drop(cfg.p_drop);
  std::vector<bool> keep(n);
  std::size_t kept = 0;
  while (kept == 0) {
    kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      keep[i] = !drop(rng);
      kept += keep[i];
    }
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (!keep[pos]) continue;
    out.tokens.push_back(x[order[pos]]);
    out.source_index.push_back(order[pos]);
  }
  return out;
}

std::vector<double> token_weights(const std::vector<std::string>& source, const std::vector<std::string>& target,
                                  double alpha) {
  const std::unordered_set<std::string> in_source(source.begin(), source.end());
  std::vector<double> w;
  w.reserve(target.size());
  for (const auto& t : target) w.push_back(in_source.count(t) ? 1.0 : alpha);
  return w;
}

double weighted_loss(const std::vector<double>& target_probs, const std::vector<double>& weights,
                     const std::vector<std::vector<double>>& attentions, double coverage_weight) {
  if (target_probs.size() != weights.size() || target_probs.size() != attentions.size()) {
    throw text::LengthMismatchError("weighted_loss: probabilities, weights and attention maps differ in length");
  }
  double nll = 0, penalty = 0;
  std::vector<double> coverage;
  for (std::size_t t = 0; t < target_probs.size(); ++t) {
    nll -= weights[t] * std::log(target_probs[t]);
    const auto& a = attentions[t];
    if (coverage.empty()) coverage.assign(a.size(), 0.0);
    if (a.size() != coverage.size()) throw text::LengthMismatchError("weighted_loss: ragged attention maps");
    for (std::size_t j = 0; j < a.size(); ++j) {
      penalty += std::min(a[j], coverage[j]);
      coverage[j] += a[j];
    }
  }
  return nll + coverage_weight * penalty;
}

MergeRule parse_merge_rule(std::string_view s) {
  if (s == "replace") return MergeRule::kReplace;
  if (s == "max") return MergeRule::kMax;
  throw std::invalid_argument("unknown merge rule '" + std::string(s) + "' (expected replace or max)");
}

std::string_view to_string(MergeRule m) { return m == MergeRule::kReplace ? "replace" : "max"; }

TeacherForced sequence_loss(nn::Graph& g, const Seq2Seq& model, const text::Sentence& src,
                            std::string_view category, const text::Sentence& tgt, double alpha, real dropout,
                            const Control* control) {
  Encoded enc = model.encode(g, src, category, control, dropout);
  const auto tnorms = tgt.norms();
  std::vector<int> targets;
  targets.reserve(tnorms.size() + 1);
  for (const auto& w : tnorms) targets.push_back(enc.memory.ext_id(model.vocab(), w));
  targets.push_back(Vocab::kEos);
  std::vector<double> weights = token_weights(src.norms(), tnorms, alpha);
  weights.push_back(1.0);
  return teacher_forced(g, model.decoder(), enc.memory, enc.init, targets, weights,
                        model.run_config().coverage_weight, dropout);
}

std::pair<std::vector<double>, DecoderSearch::State> DecoderSearch::step(const State& s, int token) {
  StepOutput o = dec_.step(g_, s.dec, token, enc_.memory);
  const auto d = o.distribution.value().values();
  std::vector<double> logp(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) logp[i] = std::log(std::max(static_cast<double>(d[i]), 1e-30));
  return {std::move(logp), State{o.next}};
}

Decoded decode(const Seq2Seq& model, const text::Sentence& src, std::string_view category, int beam_width,
               int max_extra_len, const Control* control) {
  nn::Graph g(false, false);
  Encoded enc = model.encode(g, src, category, control, 0);
  DecoderSearch search(g, model.decoder(), enc);
  const std::size_t max_len = src.size() + static_cast<std::size_t>(std::max(max_extra_len, 0));
  auto best = beam_search(search, static_cast<std::size_t>(beam_width), max_len);
  Decoded out;
  out.ids = best.tokens;
  out.log_prob = best.log_prob;
  for (int id : best.tokens) out.tokens.push_back(enc.memory.word(model.vocab(), id));
  out.probabilities = std::move(enc.probabilities);
  return out;
}

Editor::Editor(nn::ParameterSet& ps, const std::string& prefix, const EditorConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg) {
  embedding_ = &ps.add_uniform(prefix + ".embedding", {cfg.vocab_size, cfg.embed}, nn::kInitRange, rng);
  encoder_ = nn::BiLstm(ps, prefix + ".encoder", cfg.embed, cfg.hidden, rng);
  project_ = nn::Linear(ps, prefix + ".project", 2 * cfg.hidden, cfg.hidden, rng);
  bridge_h_ = nn::Linear(ps, prefix + ".bridge_h", 2 * cfg.hidden, cfg.hidden, rng);
  bridge_c_ = nn::Linear(ps, prefix + ".bridge_c", 2 * cfg.hidden, cfg.hidden, rng);
  decoder_ = AttentionDecoder(ps, prefix + ".decoder", DecoderConfig{cfg.vocab_size, cfg.embed, cfg.hidden},
                              embedding_, rng);
}

EncoderOutput Editor::encode(nn::Graph& g, const std::vector<int>& ids, real input_dropout) const {
  if (ids.empty()) throw nn::ShapeError("editor: empty source");
  Var x = nn::embedding(g.param(*embedding_), ids);
  nn::BiLstmOutput bi = encoder_.encode(g, x, input_dropout);
  EncoderOutput out;
  out.states = project_(g, bi.states);
  out.init.h = nn::tanh(bridge_h_(g, nn::concat({bi.forward.h, bi.backward.h}, 1)));
  out.init.c = bridge_c_(g, nn::concat({bi.forward.c, bi.backward.c}, 1));
  return out;
}

EditorConfig editor_config(const RunConfig& cfg, int vocab_size) {
  return EditorConfig{vocab_size, cfg.embed, cfg.hidden};
}

EditorModel::EditorModel(Vocab vocab, const RunConfig& cfg) : cfg_(cfg), vocab_(std::move(vocab)) {
  std::mt19937_64 rng(nn::mix_seed(cfg_.seed, 0xED));
  net_ = Editor(params_, "editor", editor_config(cfg_, vocab_.size()), rng);
}

Encoded EditorModel::encode(nn::Graph& g, const text::Sentence& src, std::string_view, const Control* control,
                            real dropout) const {
  if (control) throw std::invalid_argument("control vectors require a modular system");
  Encoded enc;
  enc.memory = map_source(vocab_, src.norms());
  EncoderOutput out = net_.encode(g, enc.memory.ids, dropout);
  enc.memory.states = out.states;
  enc.init = out.init;
  return enc;
}

nn::Checkpoint EditorModel::to_checkpoint() const {
  nlohmann::json cfg = {{"kind", kind()}, {"run_config", cfg_.to_json()}, {"vocab", vocab_.to_json()}};
  return nn::snapshot(params_, cfg.dump());
}

std::unique_ptr<EditorModel> EditorModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  const auto cfg = nlohmann::json::parse(ckpt.config);
  if (cfg.value("kind", "") != "editor") {
    throw nn::CheckpointError(nn::CheckpointError::Kind::kCorrupt,
                              "checkpoint holds a '" + cfg.value("kind", "") + "' model, expected 'editor'");
  }
  auto m = std::make_unique<EditorModel>(Vocab::from_json(cfg.at("vocab")), RunConfig::from_json(cfg.at("run_config")));
  nn::load_parameters(m->params_, ckpt);
  return m;
}

TrainingCurve pretrain_autoencoder(Seq2Seq& model, const std::vector<text::Sentence>& corpus, int steps,
                                   const NoiseConfig& noise, const StepCallback& on_step) {
  if (corpus.empty()) throw std::invalid_argument("pretrain_autoencoder: empty corpus");
  const RunConfig& cfg = model.run_config();
  nn::BatchTrainer trainer(model.params(), nn::AdamConfig{cfg.pretrain_lr}, cfg.clip_norm, cfg.threads);
  std::mt19937_64 rng(nn::mix_seed(cfg.seed, 0xAE));
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  const real drop = static_cast<real>(cfg.dropout);

  TrainingCurve curve;
  std::vector<text::Sentence> noisy(static_cast<std::size_t>(cfg.batch));
  std::vector<std::size_t> chosen(noisy.size());
  std::vector<std::size_t> batch(noisy.size());
  std::iota(batch.begin(), batch.end(), 0);
  for (int step = 0; step < steps; ++step) {
    for (std::size_t b = 0; b < noisy.size(); ++b) {
      chosen[b] = pick(rng);
      noisy[b] = text::from_tokens(corrupt(corpus[chosen[b]].norms(), noise, rng).tokens);
    }
    auto res = trainer.step(
        batch,
        [&](nn::Graph& g, std::size_t k) {
          return sequence_loss(g, model, noisy[k], Vocab::kUnknownCategory, corpus[chosen[k]], 1.0, drop).loss;
        },
        nn::mix_seed(cfg.seed, 0xAE, static_cast<std::uint64_t>(step)));
    curve.losses.push_back(res.loss);
    if (on_step) on_step(step, res);
  }
  curve.token_accuracy = reconstruction_accuracy(model, corpus);
  return curve;
}

double reconstruction_accuracy(const Seq2Seq& model, const std::vector<text::Sentence>& corpus) {
  long correct = 0, total = 0;
  for (const auto& s : corpus) {
    nn::Graph g(false, false);
    TeacherForced tf = sequence_loss(g, model, s, Vocab::kUnknownCategory, s, 1.0);
    correct += tf.correct;
    total += tf.total;
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

TrainingCurve fine_tune(Seq2Seq& model, const std::vector<ParallelExample>& corpus, int steps,
                        const StepCallback& on_step) {
  if (corpus.empty()) throw std::invalid_argument("fine_tune: empty corpus");
  const RunConfig& cfg = model.run_config();
  nn::BatchTrainer trainer(model.params(), nn::AdamConfig{cfg.lr}, cfg.clip_norm, cfg.threads);
  std::mt19937_64 rng(nn::mix_seed(cfg.seed, 0xF7));
  const real drop = static_cast<real>(cfg.dropout);
  const auto loss_fn = [&](nn::Graph& g, std::size_t k) {
    const auto& ex = corpus[k];
    return sequence_loss(g, model, ex.source, ex.category, ex.target, cfg.alpha, drop).loss;
  };

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  TrainingCurve curve;
  for (int step = 0; step < steps; ++step) {
    std::vector<std::size_t> batch;
    while (batch.size() < static_cast<std::size_t>(cfg.batch)) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(order[cursor++]);
      if (batch.size() == corpus.size()) break;
    }
    auto res = trainer.step(batch, loss_fn, nn::mix_seed(cfg.seed, 0xF7, static_cast<std::uint64_t>(step)));
    curve.losses.push_back(res.loss);
    if (on_step) on_step(step, res);
    if ((step + 1) % 250 == 0) spdlog::info("fine-tune step {} loss {:.4f}", step + 1, res.loss);
  }
  return curve;
}

}  // namespace wnc::edit
