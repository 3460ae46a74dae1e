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

#include "wnc/systems.hpp"

#include <algorithm>

namespace wnc::sys {

namespace {

nn::CheckpointError wrong_kind(const std::string& got, const std::string& want) {
  return nn::CheckpointError(nn::CheckpointError::Kind::kCorrupt,
                             "checkpoint holds a '" + got + "' model, expected '" + want + "'");
}

void require_same_vocab(const Vocab& ours, const nn::Checkpoint& ckpt) {
  const auto cfg = nlohmann::json::parse(ckpt.config);
  if (!cfg.contains("vocab") || !(Vocab::from_json(cfg.at("vocab")) == ours)) {
    throw std::invalid_argument("checkpoint vocabulary differs from the system vocabulary");
  }
}

nlohmann::json header(const std::string& kind, const RunConfig& cfg, const Vocab& vocab) {
  return {{"kind", kind}, {"run_config", cfg.to_json()}, {"vocab", vocab.to_json()}};
}

}  // namespace

std::string checkpoint_kind(const nn::Checkpoint& ckpt) {
  return nlohmann::json::parse(ckpt.config).value("kind", "");
}

Var join_states(Var states, Var p, Var v) { return nn::add(states, nn::matmul(p, v)); }

std::vector<double> merge_control(const std::vector<double>& detector_p, const edit::Control& control) {
  if (control.p.size() != detector_p.size()) {
    throw std::invalid_argument("control vector has " + std::to_string(control.p.size()) + " entries for " +
                                std::to_string(detector_p.size()) + " tokens");
  }
  std::vector<double> out(detector_p.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = control.p[i];
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("control values must lie in [0, 1]");
    out[i] = control.merge == edit::MergeRule::kReplace ? c : std::max(c, detector_p[i]);
  }
  return out;
}

ModularSystem::ModularSystem(Vocab vocab, std::vector<detect::Lexicon> lexicons, const RunConfig& cfg)
    : cfg_(cfg), vocab_(std::move(vocab)), lexicons_(std::move(lexicons)) {
  cfg_.mode = "modular";
  cfg_.validate();
  // Same seeds as the stand-alone models so freshly built halves match them.
  std::mt19937_64 det_rng(cfg_.seed);
  detector_ = detect::Detector(params_, "detector", detect::detector_config(cfg_, vocab_.size(), lexicons_.size()),
                               det_rng);
  std::mt19937_64 ed_rng(nn::mix_seed(cfg_.seed, 0xED));
  editor_ = edit::Editor(params_, "editor", edit::editor_config(cfg_, vocab_.size()), ed_rng);
  join_v_ = &params_.add("join.v", {1, cfg_.hidden});
  if (concat_mode()) {
    std::mt19937_64 rng(nn::mix_seed(cfg_.seed, 0xC0));
    concat_proj_ = nn::Linear(params_, "join.concat", cfg_.hidden + cfg_.encoder_dim, cfg_.hidden, rng);
    params_.set_frozen("detector.", true);
  }
}

edit::Encoded ModularSystem::encode(nn::Graph& g, const text::Sentence& src, std::string_view category,
                                    const edit::Control* control, real dropout) const {
  const int n = static_cast<int>(src.size());
  auto fwd = detector_.forward(g, detect::make_detector_input(vocab_, lexicons_, src, category), dropout);

  edit::Encoded enc;
  enc.memory = edit::map_source(vocab_, src.norms());
  edit::EncoderOutput out = editor_.encode(g, enc.memory.ids, dropout);
  enc.init = out.init;
  enc.ungated = out.states;

  const auto pv = fwd.probabilities.value().values();
  std::vector<double> p(pv.begin(), pv.end());
  if (concat_mode()) {
    if (control) throw std::invalid_argument("control vectors are not supported in concat mode");
    enc.memory.states = concat_proj_(g, nn::concat({out.states, nn::detach(fwd.hidden)}, 1));
    enc.probabilities = std::move(p);
    return enc;
  }

  Var p_used = fwd.probabilities;
  if (control) {
    p = merge_control(p, *control);
    std::vector<real> vals(p.begin(), p.end());
    p_used = g.constant(nn::Tensor({n, 1}, std::move(vals)));
  }
  enc.memory.states = join_states(out.states, p_used, g.param(*join_v_));
  enc.probabilities = std::move(p);
  return enc;
}

std::vector<double> ModularSystem::detect(const text::Sentence& src, std::string_view category) const {
  nn::Graph g(false, false);
  auto fwd = detector_.forward(g, detect::make_detector_input(vocab_, lexicons_, src, category));
  const auto v = fwd.probabilities.value().values();
  return {v.begin(), v.end()};
}

void ModularSystem::load_detector(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "detector") throw wrong_kind(checkpoint_kind(ckpt), "detector");
  require_same_vocab(vocab_, ckpt);
  nn::load_parameters(params_, ckpt, "detector.");
}

void ModularSystem::load_editor(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "editor") throw wrong_kind(checkpoint_kind(ckpt), "editor");
  require_same_vocab(vocab_, ckpt);
  nn::load_parameters(params_, ckpt, "editor.");
}

nn::Checkpoint ModularSystem::to_checkpoint() const {
  auto cfg = header(kind(), cfg_, vocab_);
  cfg["lexicons"] = detect::lexicons_to_json(lexicons_);
  return nn::snapshot(params_, cfg.dump());
}

std::unique_ptr<ModularSystem> ModularSystem::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "modular") throw wrong_kind(checkpoint_kind(ckpt), "modular");
  const auto cfg = nlohmann::json::parse(ckpt.config);
  auto m = std::make_unique<ModularSystem>(Vocab::from_json(cfg.at("vocab")),
                                           detect::lexicons_from_json(cfg.at("lexicons")),
                                           RunConfig::from_json(cfg.at("run_config")));
  nn::load_parameters(m->params_, ckpt);
  return m;
}

ConcurrentSystem::ConcurrentSystem(Vocab vocab, const RunConfig& cfg, bool use_positions)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  cfg_.mode = "concurrent";
  cfg_.validate();
  std::mt19937_64 rng(nn::mix_seed(cfg_.seed, 0xCC));
  auto ecfg = detect::encoder_config(cfg_, vocab_.size());
  ecfg.use_positions = use_positions;
  encoder_ = nn::ContextualEncoder(params_, "concurrent.encoder", ecfg, rng);
  embedding_ = &params_.add_uniform("concurrent.embedding", {vocab_.size(), cfg_.embed}, nn::kInitRange, rng);
  const int b = cfg_.encoder_dim, h = cfg_.hidden;
  w_h_ = &params_.add_uniform("concurrent.bridge.w_h", {b, h}, nn::kInitRange, rng);
  w_h0_ = &params_.add_uniform("concurrent.bridge.w_h0", {b, h}, nn::kInitRange, rng);
  w_c0_ = &params_.add_uniform("concurrent.bridge.w_c0", {b, h}, nn::kInitRange, rng);
  decoder_ = edit::AttentionDecoder(params_, "concurrent.decoder",
                                    edit::DecoderConfig{vocab_.size(), cfg_.embed, cfg_.hidden}, embedding_, rng);
}

edit::Encoded ConcurrentSystem::encode(nn::Graph& g, const text::Sentence& src, std::string_view category,
                                       const edit::Control* control, real dropout) const {
  if (control) throw std::invalid_argument("control vectors require a modular system");
  std::vector<std::string> rows;
  rows.reserve(src.size() + 1);
  rows.push_back(vocab_.token(vocab_.category_id(category)));
  for (auto& w : src.norms()) rows.push_back(std::move(w));

  edit::Encoded enc;
  enc.memory = edit::map_source(vocab_, rows);
  Var B = encoder_.encode(g, enc.memory.ids, dropout);
  Var pooled = nn::mean_rows(B);
  enc.memory.states = nn::matmul(B, g.param(*w_h_));
  enc.init.h = nn::matmul(pooled, g.param(*w_h0_));
  enc.init.c = nn::matmul(pooled, g.param(*w_c0_));
  return enc;
}

void ConcurrentSystem::load_encoder_from_detector(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "detector") throw wrong_kind(checkpoint_kind(ckpt), "detector");
  require_same_vocab(vocab_, ckpt);
  nn::load_parameters_renamed(params_, ckpt, "concurrent.encoder.", "detector.encoder.");
}

void ConcurrentSystem::load_all(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "concurrent") throw wrong_kind(checkpoint_kind(ckpt), "concurrent");
  require_same_vocab(vocab_, ckpt);
  nn::load_parameters(params_, ckpt);
}

nn::Checkpoint ConcurrentSystem::to_checkpoint() const {
  auto cfg = header(kind(), cfg_, vocab_);
  cfg["use_positions"] = encoder_.config().use_positions;
  return nn::snapshot(params_, cfg.dump());
}

std::unique_ptr<ConcurrentSystem> ConcurrentSystem::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (checkpoint_kind(ckpt) != "concurrent") throw wrong_kind(checkpoint_kind(ckpt), "concurrent");
  const auto cfg = nlohmann::json::parse(ckpt.config);
  auto m = std::make_unique<ConcurrentSystem>(Vocab::from_json(cfg.at("vocab")),
                                              RunConfig::from_json(cfg.at("run_config")),
                                              cfg.value("use_positions", true));
  nn::load_parameters(m->params_, ckpt);
  return m;
}

std::unique_ptr<edit::Seq2Seq> load_system(const nn::Checkpoint& ckpt) {
  const std::string kind = checkpoint_kind(ckpt);
  if (kind == "modular") return ModularSystem::from_checkpoint(ckpt);
  if (kind == "concurrent") return ConcurrentSystem::from_checkpoint(ckpt);
  if (kind == "editor") return edit::EditorModel::from_checkpoint(ckpt);
  throw nn::CheckpointError(nn::CheckpointError::Kind::kCorrupt,
                            "checkpoint kind '" + kind + "' is not an editing model");
}

}  // namespace wnc::sys
