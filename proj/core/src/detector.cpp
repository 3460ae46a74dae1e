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

#include "wnc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "wnc/checkpoint.hpp"
#include "wnc/training.hpp"

namespace wnc::detect {

namespace fs = std::filesystem;

std::vector<Lexicon> load_lexicons(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw LexiconError("lexicon directory not found: " + dir.string());
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || stem.front() == '.') continue;
    auto [it, inserted] = files.emplace(stem, entry.path());
    if (!inserted) {
      throw LexiconError("duplicate lexicon name '" + stem + "': " + it->second.string() + " and " +
                         entry.path().string());
    }
  }
  if (files.empty()) spdlog::warn("no lexicon files in {}", dir.string());

  std::vector<Lexicon> out;
  for (const auto& [name, path] : files) {
    std::ifstream in(path);
    if (!in) throw LexiconError("cannot read lexicon " + path.string());
    Lexicon lex{name, {}};
    std::string line;
    while (std::getline(in, line)) {
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      const auto e = line.find_last_not_of(" \t\r");
      lex.terms.insert(text::to_lower(line.substr(b, e - b + 1)));
    }
    if (lex.terms.empty()) throw LexiconError("empty lexicon file " + path.string());
    out.push_back(std::move(lex));
  }
  return out;
}

nlohmann::json lexicons_to_json(const std::vector<Lexicon>& lexicons) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : lexicons) j.push_back({{"name", l.name}, {"terms", l.terms}});
  return j;
}

std::vector<Lexicon> lexicons_from_json(const nlohmann::json& j) {
  std::vector<Lexicon> out;
  for (const auto& e : j) {
    out.push_back(Lexicon{e.at("name").get<std::string>(), e.at("terms").get<std::set<std::string>>()});
  }
  return out;
}

int feature_dim(std::size_t num_lexicons) { return static_cast<int>(3 * num_lexicons + 2); }

nn::Tensor extract_features(const text::Sentence& s, const std::vector<Lexicon>& lexicons) {
  const int n = static_cast<int>(s.size());
  const int f = feature_dim(lexicons.size());
  nn::Tensor out({n, f});
  // membership[l][i]
  std::vector<std::vector<bool>> member(lexicons.size(), std::vector<bool>(n, false));
  for (std::size_t l = 0; l < lexicons.size(); ++l) {
    for (int i = 0; i < n; ++i) member[l][i] = lexicons[l].terms.count(s.tokens[i].norm) > 0;
  }
  for (int i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < lexicons.size(); ++l) {
      const int base = static_cast<int>(3 * l);
      out.at(i, base) = member[l][i] ? 1 : 0;
      out.at(i, base + 1) = (i > 0 && member[l][i - 1]) ? 1 : 0;
      out.at(i, base + 2) = (i + 1 < n && member[l][i + 1]) ? 1 : 0;
    }
    out.at(i, f - 2) = i == 0 ? 1 : 0;
    out.at(i, f - 1) = i == n - 1 ? 1 : 0;
  }
  return out;
}

DetectorInput make_detector_input(const Vocab& vocab, const std::vector<Lexicon>& lexicons,
                                  const text::Sentence& s, std::string_view category) {
  DetectorInput in;
  in.ids.reserve(s.size() + 1);
  in.ids.push_back(vocab.category_id(category));
  for (int id : vocab.encode(s.norms())) in.ids.push_back(id);
  in.features = extract_features(s, lexicons);
  return in;
}

Detector::Detector(nn::ParameterSet& ps, const std::string& prefix, const DetectorConfig& cfg,
                   std::mt19937_64& rng)
    : cfg_(cfg), encoder_(ps, prefix + ".encoder", cfg.encoder, rng) {
  w_in_ = &ps.add_uniform(prefix + ".w_in", {cfg.feature_dim, cfg.hidden}, nn::kInitRange, rng);
  w_b_ = &ps.add_uniform(prefix + ".w_b", {cfg.encoder.dim, 1}, nn::kInitRange, rng);
  w_e_ = &ps.add_uniform(prefix + ".w_e", {cfg.hidden, 1}, nn::kInitRange, rng);
  bias_ = &ps.add_uniform(prefix + ".bias", {1}, nn::kInitRange, rng);
}

DetectorForward Detector::forward(nn::Graph& g, const DetectorInput& input, real dropout) const {
  const int n = static_cast<int>(input.ids.size()) - 1;
  if (n < 1) throw nn::ShapeError("detector: empty sentence");
  if (input.features.rows() != n || input.features.cols() != cfg_.feature_dim) {
    throw nn::ShapeError("detector: feature matrix " + nn::shape_string(input.features.shape()) +
                         " does not match " + std::to_string(n) + " tokens x " + std::to_string(cfg_.feature_dim));
  }
  DetectorForward out;
  out.encoded = encoder_.encode(g, input.ids, dropout);
  out.hidden = nn::slice_rows(out.encoded, 1, n + 1);
  nn::Var e = nn::relu(nn::matmul(g.constant(input.features), g.param(*w_in_)));
  nn::Var score = nn::add(nn::matmul(out.hidden, g.param(*w_b_)), nn::matmul(e, g.param(*w_e_)));
  out.logits = nn::add_bias(score, g.param(*bias_));
  out.probabilities = nn::sigmoid(out.logits);
  return out;
}

nn::Var detection_loss(nn::Var probabilities, const std::vector<int>& labels) {
  nn::Graph& g = *probabilities.graph;
  const std::size_t n = probabilities.value().size();
  if (labels.size() != n) {
    throw std::invalid_argument("detection_loss: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(n) + " probabilities");
  }
  nn::Tensor y(probabilities.shape());
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] ? 1 : 0;
  nn::Var yv = g.constant(y);
  nn::Var pos = nn::mul(yv, nn::log(probabilities, kProbabilityClip));
  nn::Var neg = nn::mul(nn::one_minus(yv), nn::log(nn::one_minus(probabilities), kProbabilityClip));
  return nn::scale(nn::sum(nn::add(pos, neg)), real(-1) / static_cast<real>(n));
}

double detection_loss(const std::vector<double>& p, const std::vector<int>& labels) {
  if (p.size() != labels.size() || p.empty()) {
    throw std::invalid_argument("detection_loss: length mismatch or empty input");
  }
  const double eps = kProbabilityClip;
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], eps, 1.0 - eps);
    total += labels[i] ? std::log(q) : std::log(1.0 - q);
  }
  return -total / static_cast<double>(p.size());
}

std::size_t select_top_word(const std::vector<double>& p) {
  if (p.empty()) throw std::invalid_argument("select_top_word: empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

nn::ContextualEncoderConfig encoder_config(const RunConfig& cfg, int vocab_size) {
  nn::ContextualEncoderConfig e;
  e.vocab_size = vocab_size;
  e.dim = cfg.encoder_dim;
  e.layers = cfg.encoder_layers;
  e.ffn_dim = cfg.encoder_ffn;
  e.max_positions = cfg.max_positions;
  return e;
}

DetectorConfig detector_config(const RunConfig& cfg, int vocab_size, std::size_t num_lexicons) {
  DetectorConfig d;
  d.vocab_size = vocab_size;
  d.feature_dim = feature_dim(num_lexicons);
  d.hidden = cfg.hidden;
  d.encoder = encoder_config(cfg, vocab_size);
  return d;
}

DetectorModel::DetectorModel(Vocab vocab, std::vector<Lexicon> lexicons, const RunConfig& cfg)
    : cfg_(cfg), vocab_(std::move(vocab)), lexicons_(std::move(lexicons)) {
  std::mt19937_64 rng(cfg_.seed);
  net_ = Detector(params_, "detector", detector_config(cfg_, vocab_.size(), lexicons_.size()), rng);
}

std::vector<double> DetectorModel::detect(const text::Sentence& s, std::string_view category) const {
  nn::Graph g(false, false);
  auto fwd = net_.forward(g, make_detector_input(vocab_, lexicons_, s, category));
  const auto vals = fwd.probabilities.value().values();
  return {vals.begin(), vals.end()};
}

nn::Checkpoint DetectorModel::to_checkpoint() const {
  nlohmann::json cfg = {{"kind", "detector"},
                        {"run_config", cfg_.to_json()},
                        {"vocab", vocab_.to_json()},
                        {"lexicons", lexicons_to_json(lexicons_)}};
  return nn::snapshot(params_, cfg.dump());
}

DetectorModel DetectorModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  const auto cfg = nlohmann::json::parse(ckpt.config);
  if (cfg.value("kind", "") != "detector") {
    throw nn::CheckpointError(nn::CheckpointError::Kind::kCorrupt,
                              "checkpoint holds a '" + cfg.value("kind", "") + "' model, expected 'detector'");
  }
  DetectorModel m(Vocab::from_json(cfg.at("vocab")), lexicons_from_json(cfg.at("lexicons")),
                  RunConfig::from_json(cfg.at("run_config")));
  nn::load_parameters(m.params_, ckpt);
  return m;
}

DetectorTrainingReport train_detector(DetectorModel& model, const std::vector<LabeledExample>& corpus,
                                      const std::function<void(int, const DetectorModel&)>& on_epoch) {
  if (corpus.empty()) throw std::invalid_argument("train_detector: empty corpus");
  const RunConfig& cfg = model.run_config();
  std::vector<DetectorInput> inputs;
  inputs.reserve(corpus.size());
  for (const auto& ex : corpus) {
    if (ex.labels.size() != ex.source.size()) {
      throw text::LengthMismatchError("train_detector: labels do not match source length");
    }
    inputs.push_back(make_detector_input(model.vocab(), model.lexicons(), ex.source, ex.category));
  }
  const Detector& net = model.net();
  const real drop = static_cast<real>(cfg.dropout);
  nn::ExampleLoss loss_fn = [&](nn::Graph& g, std::size_t k) {
    auto fwd = net.forward(g, inputs[k], g.training() ? drop : real(0));
    return detection_loss(fwd.probabilities, corpus[k].labels);
  };

  nn::BatchTrainer trainer(model.params(), nn::AdamConfig{cfg.lr}, cfg.clip_norm, cfg.threads);
  std::vector<std::size_t> all(corpus.size());
  std::iota(all.begin(), all.end(), 0);

  DetectorTrainingReport report;
  report.epoch_losses.push_back(trainer.evaluate(all, loss_fn));
  std::mt19937_64 rng(nn::mix_seed(cfg.seed, 0xD7));
  std::uint64_t step = 0;
  for (int epoch = 1; epoch <= cfg.detector_epochs; ++epoch) {
    std::vector<std::size_t> order = all;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch) {
      std::vector<std::size_t> batch(order.begin() + b,
                                     order.begin() + std::min(order.size(), b + cfg.batch));
      trainer.step(batch, loss_fn, nn::mix_seed(cfg.seed, 0xD7, ++step));
    }
    report.epoch_losses.push_back(trainer.evaluate(all, loss_fn));
    spdlog::info("detector epoch {} loss {:.5f}", epoch, report.epoch_losses.back());
    if (on_epoch) on_epoch(epoch, model);
  }
  return report;
}

namespace {

// Masks each position with probability `mask_prob`, redrawing until at
// least one position is masked.
std::vector<int> draw_mask(std::size_t n, double mask_prob, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(mask_prob);
  std::vector<int> masked;
  while (masked.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(rng)) masked.push_back(static_cast<int>(i));
    }
  }
  return masked;
}

nn::Var mlm_loss(nn::Graph& g, const nn::ContextualEncoder& enc, const std::vector<int>& ids,
                 const std::vector<int>& masked, real dropout) {
  std::vector<int> input = ids;
  for (int i : masked) input[i] = Vocab::kMask;
  nn::Var logp = nn::log_softmax(enc.mlm_logits(g, enc.encode(g, input, dropout)));
  const int v = enc.config().vocab_size;
  std::vector<int> flat;
  for (int i : masked) flat.push_back(i * v + ids[i]);
  return nn::scale(nn::sum(nn::gather(logp, flat)), real(-1) / static_cast<real>(masked.size()));
}

}  // namespace

MlmReport masked_lm_pretrain(nn::ParameterSet& params, const nn::ContextualEncoder& encoder,
                             const std::vector<std::vector<int>>& corpus, double mask_prob, int steps,
                             const RunConfig& cfg) {
  if (!(mask_prob > 0) || mask_prob > 1) {
    throw std::invalid_argument("masked_lm_pretrain: mask_prob must be in (0, 1]; no position would be masked");
  }
  std::vector<std::vector<int>> usable;
  for (const auto& s : corpus) {
    if (!s.empty()) usable.push_back(s);
  }
  if (usable.empty()) throw std::invalid_argument("masked_lm_pretrain: empty corpus");

  nn::BatchTrainer trainer(params, nn::AdamConfig{cfg.pretrain_lr}, cfg.clip_norm, cfg.threads);
  std::mt19937_64 rng(nn::mix_seed(cfg.seed, 0x4D4C4D));
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  const real drop = static_cast<real>(cfg.dropout);

  MlmReport report;
  for (int step = 0; step < steps; ++step) {
    std::vector<std::size_t> chosen(static_cast<std::size_t>(cfg.batch));
    std::vector<std::vector<int>> masks(chosen.size());
    for (std::size_t b = 0; b < chosen.size(); ++b) {
      chosen[b] = pick(rng);
      masks[b] = draw_mask(usable[chosen[b]].size(), mask_prob, rng);
    }
    std::vector<std::size_t> batch(chosen.size());
    std::iota(batch.begin(), batch.end(), 0);
    auto res = trainer.step(
        batch,
        [&](nn::Graph& g, std::size_t k) { return mlm_loss(g, encoder, usable[chosen[k]], masks[k], drop); },
        nn::mix_seed(cfg.seed, 0x4D4C4D, static_cast<std::uint64_t>(step)));
    report.losses.push_back(res.loss);
  }
  report.recovery_accuracy = masked_recovery_accuracy(encoder, usable, mask_prob, cfg.seed);
  return report;
}

double masked_recovery_accuracy(const nn::ContextualEncoder& encoder, const std::vector<std::vector<int>>& corpus,
                                double mask_prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5EEDULL);
  std::size_t hit = 0, total = 0;
  const int v = encoder.config().vocab_size;
  for (const auto& ids : corpus) {
    if (ids.empty()) continue;
    const auto masked = draw_mask(ids.size(), mask_prob, rng);
    std::vector<int> input = ids;
    for (int i : masked) input[i] = Vocab::kMask;
    nn::Graph g(false, false);
    const nn::Tensor& logits = encoder.mlm_logits(g, encoder.encode(g, input)).value();
    for (int i : masked) {
      const real* row = logits.data() + static_cast<std::size_t>(i) * v;
      const int best = static_cast<int>(std::max_element(row, row + v) - row);
      hit += best == ids[i];
      ++total;
    }
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

}  // namespace wnc::detect
