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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wnc/detector.hpp"

using namespace wnc;
using namespace wnc::detect;
namespace fs = std::filesystem;

namespace {

fs::path make_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wnc_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& body) { std::ofstream(p) << body; }

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 8;
  cfg.encoder_dim = 8;
  cfg.encoder_ffn = 16;
  cfg.encoder_layers = 1;
  cfg.max_positions = 32;
  cfg.lr = 1e-2;
  cfg.batch = 4;
  cfg.dropout = 0;
  return cfg;
}

}  // namespace

TEST_CASE("load_lexicons") {
  const auto dir = make_dir("lex");
  write(dir / "hedges.txt", "apparently\nallegedly\n");
  write(dir / "factives.txt", "# comment\nreveal\nexpose\n\n");
  const auto lex = load_lexicons(dir);
  REQUIRE(lex.size() == 2);
  CHECK(lex[0].name == "factives");
  CHECK(lex[0].terms == std::set<std::string>{"expose", "reveal"});
  CHECK(lex[1].terms.count("allegedly"));
  CHECK(lexicons_from_json(lexicons_to_json(lex)) == lex);

  CHECK(load_lexicons(make_dir("lex_empty")).empty());

  const auto dup = make_dir("lex_dup");
  write(dup / "hedges.txt", "a\n");
  write(dup / "hedges.lst", "b\n");
  CHECK_THROWS_AS(load_lexicons(dup), LexiconError);
  CHECK_THROWS_AS(load_lexicons(dir / "missing"), LexiconError);
}

TEST_CASE("shipped lexicons load") {
  const auto lex = load_lexicons(fs::path(WNC_DATA_DIR) / "lexicons");
  CHECK(lex.size() == 5);
  for (const auto& l : lex) CHECK(l.terms.size() >= 10);
}

TEST_CASE("features mark the token and its neighbours") {
  const std::vector<Lexicon> lex = {{"factives", {"expose", "exposed"}}};
  CHECK(feature_dim(1) == 5);
  const auto f = extract_features(text::tokenize("he exposed the truth"), lex);
  REQUIRE(f.shape() == nn::Shape{4, 5});
  const std::vector<std::vector<int>> expected = {
      {0, 0, 1, 1, 0},  // next token is a factive, sentence-initial
      {1, 0, 0, 0, 0},
      {0, 1, 0, 0, 0},  // previous token is a factive
      {0, 0, 0, 0, 1},  // sentence-final
  };
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 5; ++k) CHECK(f.at(i, k) == expected[i][k]);

  const auto empty = extract_features(text::tokenize("he exposed the truth"), {});
  CHECK(empty.cols() == 2);
  const auto single = extract_features(text::tokenize("hello"), lex);
  CHECK(single.at(0, 3) == 1);
  CHECK(single.at(0, 4) == 1);
}

TEST_CASE("zero parameters give probability one half") {
  const auto vocab = Vocab::build({{"he", "exposed", "the", "truth"}}, 100, {"politics"});
  DetectorModel model(vocab, {{"factives", {"exposed"}}}, tiny_config());
  for (auto& p : model.params()) p.value.fill(0);
  const auto p = model.detect(text::tokenize("he exposed the truth"), "politics");
  REQUIRE(p.size() == 4);
  for (double v : p) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("detection loss values") {
  CHECK(detection_loss(std::vector<double>{0.5, 0.5, 0.5}, {1, 0, 0}) == doctest::Approx(std::log(2.0)));
  CHECK(detection_loss(std::vector<double>{1.0, 0.0}, {1, 0}) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(detection_loss(std::vector<double>{0.9, 0.2}, {1, 0}) ==
        doctest::Approx(-(std::log(0.9) + std::log(0.8)) / 2));
  CHECK(std::isfinite(detection_loss(std::vector<double>{0.0}, {1})));
  CHECK_THROWS(detection_loss(std::vector<double>{0.5}, {1, 0}));

  nn::Graph g;
  auto p = g.variable(nn::Tensor::matrix(2, 1, {0.9f, 0.2f}));
  CHECK(g.value(detection_loss(p, {1, 0})).item() == doctest::Approx(-(std::log(0.9) + std::log(0.8)) / 2));
}

TEST_CASE("select_top_word") {
  CHECK(select_top_word({0.1, 0.9, 0.3}) == 1);
  CHECK(select_top_word({0.4, 0.4, 0.4}) == 0);
}

TEST_CASE("detector training lowers the loss and round-trips through a checkpoint") {
  const std::vector<std::string> sents = {"the heroic senator spoke", "a senator spoke", "the notorious mayor spoke",
                                          "the mayor spoke today", "heroic fans cheered", "fans cheered loudly"};
  std::vector<std::vector<std::string>> toks;
  std::vector<LabeledExample> data;
  for (const auto& s : sents) {
    const auto t = text::tokenize(s);
    toks.push_back(t.norms());
    std::vector<int> labels(t.size(), 0);
    for (std::size_t i = 0; i < t.size(); ++i) labels[i] = t.norms()[i] == "heroic" || t.norms()[i] == "notorious";
    data.push_back({t, labels, "politics"});
  }
  auto cfg = tiny_config();
  cfg.detector_epochs = 30;
  DetectorModel model(Vocab::build(toks, 100, {"politics"}), {{"subjectives", {"heroic"}}}, cfg);
  int epochs_seen = 0;
  const auto report = train_detector(model, data, [&](int, const DetectorModel&) { ++epochs_seen; });
  CHECK(epochs_seen == 30);
  REQUIRE(report.epoch_losses.size() == 31);
  CHECK(report.epoch_losses.back() < report.epoch_losses.front() * 0.5);

  const auto p = model.detect(text::tokenize("the heroic senator spoke"), "politics");
  CHECK(select_top_word(p) == 1);

  const auto back = DetectorModel::from_checkpoint(nn::parse_checkpoint(nn::serialize_checkpoint(model.to_checkpoint())));
  CHECK(back.detect(text::tokenize("the notorious mayor spoke"), "politics") ==
        model.detect(text::tokenize("the notorious mayor spoke"), "politics"));
  CHECK(back.lexicons() == model.lexicons());
  CHECK(back.vocab() == model.vocab());
}

TEST_CASE("masked pretraining") {
  const auto vocab = Vocab::build({{"a", "b", "c", "d"}}, 100, {});
  auto cfg = tiny_config();
  DetectorModel model(vocab, {}, cfg);
  const std::vector<std::vector<int>> corpus = {vocab.encode({"a", "b", "c", "d"}), vocab.encode({"d", "c", "b"})};
  CHECK_THROWS_AS(masked_lm_pretrain(model.params(), model.net().encoder(), corpus, 0.0, 5, cfg),
                  std::invalid_argument);
  const auto report = masked_lm_pretrain(model.params(), model.net().encoder(), corpus, 0.3, 150, cfg);
  REQUIRE(report.losses.size() == 150);
  CHECK(report.losses.back() < report.losses.front());
  const double acc = masked_recovery_accuracy(model.net().encoder(), corpus, 0.3, 1);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
}
