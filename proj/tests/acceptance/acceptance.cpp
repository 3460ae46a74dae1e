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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   wnc_acceptance [--only A3,A4] [--verbose]
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "wnc/beam.hpp"
#include "wnc/bleu.hpp"
#include "wnc/checkpoint.hpp"
#include "wnc/corpus.hpp"
#include "wnc/detector.hpp"
#include "wnc/editor.hpp"
#include "wnc/eval.hpp"
#include "wnc/pipeline.hpp"
#include "wnc/service.hpp"
#include "wnc/synthetic.hpp"
#include "wnc/systems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wnc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wnc-acceptance-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- A1 ------------------------------------------------------------------

Outcome a1_gradients() {
  const std::string cmd = std::string(WNC_GRADCHECK_BIN) + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {false, "cannot start " WNC_GRADCHECK_BIN};
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = ::pclose(pipe);
  int cases = 0, failures = 0;
  double worst = 0;
  std::istringstream lines(out);
  for (std::string line; std::getline(lines, line);) {
    int c = 0, f = 0;
    double w = 0;
    if (std::sscanf(line.c_str(), "ops: %d cases, %d failures, worst rel err %lf", &c, &f, &w) == 3 ||
        std::sscanf(line.c_str(), "blocks: %d cases, %d failures, worst rel err %lf", &c, &f, &w) == 3) {
      cases += c;
      failures += f;
      worst = std::max(worst, w);
    }
  }
  const bool pass = status == 0 && failures == 0 && cases >= 20;
  std::string detail = std::to_string(cases) + " op/block cases in double precision, " + std::to_string(failures) +
                       " failures, worst relative error " + fmt("%.2e", worst) + " (eps 1e-4, tol 1e-3)";
  if (!pass) detail += "\n" + out;
  return {pass, detail};
}

// ---- A2 ------------------------------------------------------------------

corpus::CorpusConfig fixture_config() {
  corpus::CorpusConfig cfg;
  cfg.filters.wordlist = corpus::load_wordlist(fs::path(WNC_DATA_DIR) / "wordlist.txt");
  return cfg;
}

Outcome a2_corpus_golden() {
  const fs::path input = fs::path(WNC_FIXTURES_DIR) / "revisions_20.jsonl";
  const json expected = json::parse(read_file(fs::path(WNC_FIXTURES_DIR) / "revisions_20.expected.json"));
  const auto cfg = fixture_config();
  const auto read = corpus::read_revisions(input);
  auto splits = corpus::build_corpus(read.records, cfg);
  splits.stats.malformed = read.malformed;

  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  auto ids = [](const std::vector<corpus::LabeledPair>& v) {
    std::vector<std::string> out;
    for (const auto& p : v) out.push_back(p.pair.rev_id);
    return out;
  };

  expect(read.malformed == expected["malformed"].get<std::size_t>(), "malformed count");
  expect(ids(splits.biased_full) == expected["biased_full"].get<std::vector<std::string>>(), "biased_full membership");
  expect(ids(splits.biased_word) == expected["biased_word"].get<std::vector<std::string>>(), "biased_word membership");

  std::vector<std::string> neutral;
  for (const auto& n : splits.neutral) neutral.push_back(n.sentence.raw);
  expect(neutral == expected["neutral"].get<std::vector<std::string>>(), "neutral sentences");

  for (const auto& [rule, count] : expected["reject_counts"].items()) {
    expect(splits.stats.rejects.at(rule) == count.get<std::size_t>(), "reject count " + rule);
  }

  std::map<std::string, std::set<std::string>> rules_by_rev;
  for (const auto& r : splits.rejects) rules_by_rev[r.rev_id].insert(std::string(corpus::to_string(r.rule)));
  const auto full = ids(splits.biased_full);
  for (const auto& [rev, outcome] : expected["changed_pair_outcome"].items()) {
    const bool kept = std::find(full.begin(), full.end(), rev) != full.end();
    auto others = rules_by_rev[rev];
    others.erase("min-edit");  // unchanged neighbours are always min-edit rejects
    if (outcome == "kept") {
      expect(kept && others.empty(), rev + " kept");
    } else if (outcome == "min-edit") {
      expect(!kept && others.empty() && rules_by_rev[rev].count("min-edit"), rev + " min-edit");
    } else {
      expect(!kept && others == std::set<std::string>{outcome.get<std::string>()}, rev + " " + outcome.get<std::string>());
    }
  }
  for (const auto& [rev, labels] : expected["biased_word_labels"].items()) {
    bool found = false;
    for (const auto& p : splits.biased_word) {
      if (p.pair.rev_id == rev) found = p.labels == labels.get<std::vector<int>>();
    }
    expect(found, rev + " labels");
  }

  const json& st = expected["stats"];
  expect(splits.stats.revisions == st["revisions"].get<std::size_t>(), "revision count");
  auto check_split = [&](const corpus::SplitStats& s, const json& e, const std::string& name) {
    expect(s.pairs == e["pairs"].get<std::size_t>(), name + " pairs");
    expect(s.total_words == e["total_words"].get<std::size_t>(), name + " total words");
    expect(std::abs(s.mean_length - e["total_words"].get<double>() / e["pairs"].get<double>()) < 1e-12,
           name + " mean length");
    if (e.contains("mean_revised_words")) {
      expect(std::abs(s.mean_revised_words - e["mean_revised_words"].get<double>()) < 1e-12, name + " mean revised");
    }
  };
  check_split(splits.stats.biased_full, st["biased_full"], "biased_full");
  check_split(splits.stats.biased_word, st["biased_word"], "biased_word");
  check_split(splits.stats.neutral, st["neutral"], "neutral");

  // Two independent runs must write byte-identical files.
  const fs::path a = scratch_dir("corpus-a"), b = scratch_dir("corpus-b");
  corpus::write_corpus(splits, cfg, a);
  {
    const auto again = corpus::read_revisions(input);
    auto splits2 = corpus::build_corpus(again.records, fixture_config());
    splits2.stats.malformed = again.malformed;
    corpus::write_corpus(splits2, cfg, b);
  }
  int files = 0;
  for (const auto* name : {"biased_full.jsonl", "biased_word.jsonl", "neutral.jsonl", "stats.json"}) {
    const std::string x = read_file(a / name), y = read_file(b / name);
    expect(!x.empty() && x == y, std::string("byte-identical ") + name);
    ++files;
  }

  std::string detail = std::to_string(full.size()) + " biased-full / " + std::to_string(splits.biased_word.size()) +
                       " biased-word / " + std::to_string(neutral.size()) + " neutral, " +
                       std::to_string(splits.rejects.size()) + " rejects; " + std::to_string(files) +
                       " output files byte-identical across runs";
  for (const auto& p : problems) detail += "\n    mismatch: " + p;
  return {problems.empty(), detail};
}

// ---- A3 ------------------------------------------------------------------

// Direct transcription of the BLEU formula: clipped n-gram precisions,
// geometric mean, brevity penalty. Sentence scores add one to numerator and
// denominator for n >= 2; corpus scores pool raw counts and skip orders no
// candidate reaches.
namespace oracle {

using Counts = std::unordered_map<std::string, int>;

Counts grams(const std::vector<std::string>& t, int n) {
  Counts c;
  for (int i = 0; i + n <= static_cast<int>(t.size()); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) key += t[i + j] + '\x1f';
    ++c[key];
  }
  return c;
}

void stats(const std::vector<std::string>& cand, const std::vector<std::string>& ref, double* m, double* tot) {
  for (int n = 1; n <= 4; ++n) {
    const Counts c = grams(cand, n), r = grams(ref, n);
    for (const auto& [g, k] : c) {
      tot[n - 1] += k;
      auto it = r.find(g);
      if (it != r.end()) m[n - 1] += std::min(k, it->second);
    }
  }
}

double combine(const double* m, const double* tot, double c, double r, bool smooth) {
  if (c == 0 || m[0] == 0) return 0;
  double product = 1;
  int orders = 0;
  for (int n = 0; n < 4; ++n) {
    double num = m[n], den = tot[n];
    if (smooth && n > 0) {
      num += 1;
      den += 1;
    }
    if (den == 0) continue;
    if (num == 0) return 0;
    product *= num / den;
    ++orders;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::pow(product, 1.0 / orders);
}

double sentence(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  double m[4] = {}, tot[4] = {};
  stats(cand, ref, m, tot);
  return combine(m, tot, static_cast<double>(cand.size()), static_cast<double>(ref.size()), true);
}

double corpus(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs) {
  double m[4] = {}, tot[4] = {}, c = 0, r = 0;
  for (const auto& [cand, ref] : pairs) {
    stats(cand, ref, m, tot);
    c += static_cast<double>(cand.size());
    r += static_cast<double>(ref.size());
  }
  return combine(m, tot, c, r, false);
}

}  // namespace oracle

Outcome a3_bleu_oracle() {
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"the", "a", "senator", "was", "described", "exposed", "as", "game", ".", ","};
  auto sentence = [&](int lo, int hi) {
    std::vector<std::string> s(std::uniform_int_distribution<int>(lo, hi)(rng));
    for (auto& w : s) w = words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
    return s;
  };
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
  double worst = 0;
  int nonzero = 0;
  for (int i = 0; i < 50; ++i) {
    auto ref = sentence(1, 14);
    std::vector<std::string> cand = ref;
    // Mutate a copy so that scores spread over (0, 1] rather than collapse to 0.
    const int edits = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int e = 0; e < edits && !cand.empty(); ++e) {
      const auto pos = std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng);
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: cand[pos] = sentence(1, 1)[0]; break;
        case 1: cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(pos)); break;
        default: cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(pos), sentence(1, 1)[0]);
      }
    }
    if (cand.empty()) cand = sentence(1, 3);
    if (i % 7 == 0) cand = sentence(1, 10);  // unrelated candidates
    const double got = text::sentence_bleu(cand, ref), want = oracle::sentence(cand, ref);
    worst = std::max(worst, std::abs(got - want));
    nonzero += want > 0;
    pairs.emplace_back(cand, ref);
  }
  double corpus_err = std::abs(text::corpus_bleu(pairs) - oracle::corpus(pairs));
  // Every prefix of the list as its own corpus.
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> head(pairs.begin(),
                                                                                     pairs.begin() + static_cast<std::ptrdiff_t>(k));
    corpus_err = std::max(corpus_err, std::abs(text::corpus_bleu(head) - oracle::corpus(head)));
  }
  const bool pass = worst < 1e-9 && corpus_err < 1e-9;
  return {pass, "50 random pairs (" + std::to_string(nonzero) + " with nonzero score): max sentence error " +
                    fmt("%.1e", worst) + ", max corpus error " + fmt("%.1e", corpus_err) + " over 50 corpora"};
}

// ---- A4 ------------------------------------------------------------------

Outcome a4_noise() {
  std::mt19937_64 rng(4);
  edit::NoiseConfig cfg;  // k = 3, p_drop = 0.25
  std::size_t kept = 0, total = 0, max_disp = 0, empty = 0;
  for (int s = 0; s < 10000; ++s) {
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    std::vector<std::string> x;
    for (int i = 0; i < n; ++i) x.push_back("w" + std::to_string(i));
    const auto r = edit::corrupt(x, cfg, rng);
    empty += r.tokens.empty();
    kept += r.tokens.size();
    total += x.size();
    // Rank of each survivor among survivors, before and after shuffling.
    std::vector<int> original = r.source_index;
    std::sort(original.begin(), original.end());
    for (std::size_t j = 0; j < r.source_index.size(); ++j) {
      if (r.tokens[j] != x[r.source_index[j]]) return {false, "source_index does not point at the emitted token"};
      const auto rank = static_cast<std::size_t>(
          std::lower_bound(original.begin(), original.end(), r.source_index[j]) - original.begin());
      max_disp = std::max(max_disp, rank > j ? rank - j : j - rank);
    }
  }
  const double survival = static_cast<double>(kept) / static_cast<double>(total);
  const bool pass = max_disp <= 3 && survival >= 0.73 && survival <= 0.77 && empty == 0;
  return {pass, "10000 corruptions (" + std::to_string(total) + " tokens): max displacement " + std::to_string(max_disp) +
                    ", survival " + fmt("%.4f", survival) + ", empty outputs " + std::to_string(empty)};
}

// ---- A5 ------------------------------------------------------------------

Outcome a5_autoencoder() {
  std::ifstream in(fs::path(WNC_FIXTURES_DIR) / "autoencoder_64.txt");
  std::vector<text::Sentence> corpus;
  std::vector<std::vector<std::string>> toks;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    corpus.push_back(text::tokenize(line));
    toks.push_back(corpus.back().norms());
  }
  RunConfig cfg;
  cfg.seed = 1;
  cfg.hidden = 64;
  cfg.pretrain_lr = 3e-3;
  cfg.batch = 16;
  cfg.dropout = 0.2;
  edit::EditorModel model(Vocab::build(toks, 5000, {}), cfg);
  const auto curve = edit::pretrain_autoencoder(model, corpus, 500, {});
  const double acc = edit::reconstruction_accuracy(model, corpus);
  return {corpus.size() == 64 && acc >= 0.95,
          std::to_string(corpus.size()) + " sentences, h=64, 500 steps: reconstruction token accuracy " +
              fmt("%.4f", acc) + " (loss " + fmt("%.3f", curve.losses.front()) + " -> " +
              fmt("%.3f", curve.losses.back()) + ")"};
}

// ---- shared synthetic system (A6, A8, A10, A12) ----------------------------

struct SyntheticRun {
  synth::SyntheticCorpus corpus;
  Vocab vocab;
  RunConfig cfg;
  std::unique_ptr<detect::DetectorModel> detector;
  std::unique_ptr<edit::EditorModel> editor;
  std::unique_ptr<sys::ModularSystem> modular;
  std::unique_ptr<sys::ConcurrentSystem> concurrent;
  double seconds = 0;
};

constexpr int kBeam = 4;
constexpr int kMaxExtra = 10;

SyntheticRun& synthetic() {
  static std::unique_ptr<SyntheticRun> run;
  if (run) return *run;
  const auto t0 = std::chrono::steady_clock::now();
  run = std::make_unique<SyntheticRun>();
  auto& r = *run;
  r.corpus = synth::generate(synth::SyntheticConfig{});
  r.vocab = Vocab::build(r.corpus.all_token_lists(), 5000, r.corpus.categories);
  r.cfg.seed = 1;
  r.cfg.encoder_layers = 2;
  r.cfg.threads = 1;
  r.cfg.categories = r.corpus.categories;
  r.cfg.pretrain_lr = 3e-3;
  r.cfg.lr = 1e-3;
  r.cfg.detector_epochs = 8;

  RunConfig dc = r.cfg;
  dc.lr = 3e-3;
  r.detector = std::make_unique<detect::DetectorModel>(r.vocab, r.corpus.lexicons, dc);
  std::vector<std::vector<int>> mlm;
  for (const auto& n : r.corpus.neutral) {
    std::vector<int> ids{r.vocab.category_id(n.category)};
    for (int id : r.vocab.encode(n.sentence.norms())) ids.push_back(id);
    mlm.push_back(std::move(ids));
  }
  detect::masked_lm_pretrain(r.detector->params(), r.detector->net().encoder(), mlm, 0.15, 300, dc);
  std::vector<detect::LabeledExample> labeled;
  for (const auto& p : r.corpus.train) labeled.push_back({p.source, p.labels, p.category});
  detect::train_detector(*r.detector, labeled);

  r.editor = std::make_unique<edit::EditorModel>(r.vocab, r.cfg);
  std::vector<text::Sentence> neutral;
  for (const auto& n : r.corpus.neutral) neutral.push_back(n.sentence);
  edit::pretrain_autoencoder(*r.editor, neutral, 600, {});

  std::vector<edit::ParallelExample> train;
  for (const auto& p : r.corpus.train) train.push_back({p.source, p.target, p.category});

  r.modular = std::make_unique<sys::ModularSystem>(r.vocab, r.corpus.lexicons, r.cfg);
  r.modular->load_detector(r.detector->to_checkpoint());
  r.modular->load_editor(r.editor->to_checkpoint());
  edit::fine_tune(*r.modular, train, 2000);

  r.concurrent = std::make_unique<sys::ConcurrentSystem>(r.vocab, r.cfg);
  r.concurrent->load_encoder_from_detector(r.detector->to_checkpoint());
  edit::pretrain_autoencoder(*r.concurrent, neutral, 600, {});
  edit::fine_tune(*r.concurrent, train, 2000);

  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double exact_match(const edit::Seq2Seq& model, const std::vector<synth::SyntheticPair>& test) {
  int hit = 0;
  for (const auto& p : test) hit += edit::decode(model, p.source, p.category, kBeam, kMaxExtra).tokens == p.target.norms();
  return static_cast<double>(hit) / static_cast<double>(test.size());
}

Outcome a6_synthetic() {
  auto& r = synthetic();
  const auto& test = r.corpus.test;
  int det_hits = 0;
  for (const auto& p : test) det_hits += p.labels[detect::select_top_word(r.detector->detect(p.source, p.category))];
  const double det = static_cast<double>(det_hits) / static_cast<double>(test.size());
  const double mod = exact_match(*r.modular, test);
  const double conc = exact_match(*r.concurrent, test);
  const std::size_t vocab_words = r.corpus.vocabulary_size();
  const bool pass = vocab_words <= 300 && test.size() == 200 && det >= 0.90 && mod >= 0.80 && conc >= 0.80;
  return {pass, "vocab " + std::to_string(vocab_words) + " words, " + std::to_string(test.size()) +
                    " test pairs: detector top-word " + fmt("%.3f", det) + " (>= 0.90), MODULAR exact match " +
                    fmt("%.3f", mod) + " (>= 0.80), CONCURRENT exact match " + fmt("%.3f", conc) +
                    " (>= 0.80); training " + fmt("%.0f", r.seconds) + " s"};
}

// ---- A7 ------------------------------------------------------------------

Outcome a7_join_identities() {
  auto& r = synthetic();
  const auto& m = *r.modular;
  std::vector<std::string> problems;

  // (a) p = 0 reproduces the ungated editor: same weights in a stand-alone editor.
  edit::EditorModel plain(r.vocab, r.cfg);
  nn::load_parameters(plain.params(), m.to_checkpoint(), "editor.");
  double state_diff = 0;
  int identical = 0;
  const int probes = 50;
  for (int i = 0; i < probes; ++i) {
    const auto& p = r.corpus.test[i];
    edit::Control zero{std::vector<double>(p.source.size(), 0.0), edit::MergeRule::kReplace};
    nn::Graph g(false);
    const auto gated = m.encode(g, p.source, p.category, &zero, 0);
    const auto ungated = plain.encode(g, p.source, p.category, nullptr, 0);
    const auto& a = g.value(gated.memory.states);
    const auto& b = g.value(ungated.memory.states);
    const auto& u = g.value(gated.ungated);
    for (std::size_t k = 0; k < a.size(); ++k) {
      state_diff = std::max<double>(state_diff, std::abs(a[k] - b[k]));
      state_diff = std::max<double>(state_diff, std::abs(a[k] - u[k]));
    }
    const auto d0 = edit::decode(m, p.source, p.category, kBeam, kMaxExtra, &zero);
    const auto d1 = edit::decode(plain, p.source, p.category, kBeam, kMaxExtra);
    identical += d0.ids == d1.ids;
  }
  if (identical != probes) problems.push_back("p=0 decodes differ from the ungated editor");
  if (!(state_diff < 1e-6)) problems.push_back("p=0 encoder states differ");

  // (b) h'_i - h_i = p_i v for sampled p.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1), up(0, 1);
  double join_err = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 9, h = 64;
    nn::Tensor H({n, h}), P({n, 1}), V({1, h});
    for (auto& x : H.values()) x = static_cast<nn::real>(u(rng));
    for (auto& x : P.values()) x = static_cast<nn::real>(up(rng));
    for (auto& x : V.values()) x = static_cast<nn::real>(u(rng));
    nn::Graph g(false);
    const auto& out = g.value(sys::join_states(g.constant(H), g.constant(P), g.constant(V)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < h; ++j) {
        const double diff = static_cast<double>(out.at(i, j)) - static_cast<double>(H.at(i, j));
        join_err = std::max(join_err, std::abs(diff - static_cast<double>(P[i]) * static_cast<double>(V[j])));
      }
    }
  }
  if (!(join_err < 1e-7)) problems.push_back("join law error " + fmt("%.2e", join_err));

  // (c) concat ablation: detector gradients stay identically zero.
  RunConfig cc = r.cfg;
  cc.join = "concat";
  sys::ModularSystem concat(r.vocab, r.corpus.lexicons, cc);
  concat.load_detector(r.detector->to_checkpoint());
  concat.load_editor(r.editor->to_checkpoint());
  const auto before = concat.to_checkpoint();
  std::vector<edit::ParallelExample> train;
  for (std::size_t i = 0; i < 64; ++i) {
    const auto& p = r.corpus.train[i];
    train.push_back({p.source, p.target, p.category});
  }
  double detector_grad = 0, other_grad = 0;
  int steps_seen = 0;
  edit::fine_tune(concat, train, 30, [&](int, const nn::StepResult&) {
    ++steps_seen;
    for (const auto& p : concat.params()) {
      double sq = 0;
      for (auto v : p.grad.values()) sq += static_cast<double>(v) * v;
      (p.name.rfind("detector.", 0) == 0 ? detector_grad : other_grad) += sq;
    }
  });
  const auto after = concat.to_checkpoint();
  bool detector_unchanged = true;
  for (std::size_t i = 0; i < before.tensors.size(); ++i) {
    if (before.tensors[i].first.rfind("detector.", 0) != 0) continue;
    const auto& x = before.tensors[i].second.values();
    const auto& y = after.tensors[i].second.values();
    detector_unchanged &= std::equal(x.begin(), x.end(), y.begin(), y.end());
  }
  if (detector_grad != 0.0) problems.push_back("concat mode produced detector gradients");
  if (!detector_unchanged) problems.push_back("concat mode changed detector weights");
  if (!(other_grad > 0)) problems.push_back("concat run produced no gradients at all");

  std::string detail = std::to_string(identical) + "/" + std::to_string(probes) +
                       " p=0 decodes token-identical to the ungated editor, max state diff " + fmt("%.1e", state_diff) +
                       "; join law max error " + fmt("%.1e", join_err) + " over 200 draws; concat ablation " +
                       std::to_string(steps_seen) + " steps, detector grad sum of squares " + fmt("%g", detector_grad);
  for (const auto& p : problems) detail += "\n    " + p;
  return {problems.empty(), detail};
}

// ---- A8 ------------------------------------------------------------------

Outcome a8_control() {
  auto& r = synthetic();
  int forced_on = 0, forced_off = 0;
  for (const auto& p : r.corpus.test) {
    edit::Control on{std::vector<double>(p.source.size(), 0.0), edit::MergeRule::kReplace};
    on.p[p.marker_index] = 1.0;
    forced_on += edit::decode(*r.modular, p.source, p.category, kBeam, kMaxExtra, &on).tokens == p.target.norms();
    edit::Control off{std::vector<double>(p.source.size(), 0.0), edit::MergeRule::kReplace};
    forced_off += edit::decode(*r.modular, p.source, p.category, kBeam, kMaxExtra, &off).tokens == p.source.norms();
  }
  const double n = static_cast<double>(r.corpus.test.size());
  const double on_rate = forced_on / n, off_rate = forced_off / n;
  return {on_rate >= 0.70 && off_rate >= 0.70,
          "p=1 on the marker gives the planted target in " + fmt("%.3f", on_rate) +
              " (>= 0.70); p=0 everywhere gives the source copy in " + fmt("%.3f", off_rate) + " (>= 0.70)"};
}

// ---- A9 ------------------------------------------------------------------

Outcome a9_weighted_loss() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int steps = 1 + trial % 8, n = 1 + trial % 6;
    std::vector<std::string> src, tgt;
    for (int i = 0; i < n; ++i) src.push_back("s" + std::to_string(i));
    for (int t = 0; t < steps; ++t) tgt.push_back(t % 2 ? "new" + std::to_string(t) : src[t % n]);
    std::vector<double> probs;
    std::vector<std::vector<double>> att;
    for (int t = 0; t < steps; ++t) {
      probs.push_back(u(rng));
      std::vector<double> a(n);
      double z = 0;
      for (auto& x : a) z += (x = u(rng));
      for (auto& x : a) x /= z;
      att.push_back(a);
    }
    const double cw = u(rng) * 2;
    const double got = edit::weighted_loss(probs, edit::token_weights(src, tgt, 1.0), att, cw);
    double nll = 0, cov = 0;
    std::vector<double> coverage(n, 0.0);
    for (int t = 0; t < steps; ++t) {
      nll -= std::log(probs[t]);
      for (int j = 0; j < n; ++j) {
        cov += std::min(att[t][j], coverage[j]);
        coverage[j] += att[t][j];
      }
    }
    worst = std::max(worst, std::abs(got - (nll + cw * cov)));
  }
  const auto exposed = edit::token_weights({"he", "exposed", "the", "truth"}, {"he", "described", "the", "truth"}, 1.3);
  const auto militants = edit::token_weights({"jewish", "forces", "overcome", "arab", "militants", "."},
                                             {"jewish", "forces", "overcome", "arab", "forces", "."}, 1.3);
  const bool lambda_ok = exposed == std::vector<double>{1, 1.3, 1, 1} &&
                         militants == std::vector<double>(6, 1.0);
  auto show = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%g", v[i]);
    return s + "]";
  };
  return {worst < 1e-9 && lambda_ok, "alpha=1 vs NLL + coverage: max error " + fmt("%.1e", worst) +
                                         " over 200 cases; exposed->described " + show(exposed) +
                                         "; militants->forces " + show(militants)};
}

// ---- A10 -----------------------------------------------------------------

Outcome a10_evaluation() {
  auto& r = synthetic();
  const std::string bytes = nn::serialize_checkpoint(r.modular->to_checkpoint());
  const auto sys_a = sys::load_system(nn::parse_checkpoint(bytes));
  const auto sys_b = sys::load_system(nn::parse_checkpoint(bytes));
  const auto records = pipeline::to_records(r.corpus.test, "t");
  eval::EvalConfig ec;
  const auto out_a = eval::decode_all(*sys_a, records, ec);
  const auto out_b = eval::decode_all(*sys_b, records, ec);
  std::vector<double> correct_a, correct_b;
  for (std::size_t i = 0; i < records.size(); ++i) {
    correct_a.push_back(out_a[i].output == out_a[i].reference);
    correct_b.push_back(out_b[i].output == out_b[i].reference);
  }
  int contains = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) {
      const auto k = pick(rng);
      a.push_back(correct_a[k]);
      b.push_back(correct_b[k]);
    }
    const auto ci = eval::bootstrap_difference_ci(a, b, 1000, 0.95, 1000 + static_cast<std::uint64_t>(trial));
    contains += ci.low <= 0.0 && 0.0 <= ci.high;
  }

  // Source copy on splits where every source differs from its target.
  bool all_differ = true;
  for (const auto& rec : records) all_differ &= rec.source.norms() != rec.target.norms();
  const auto copy_report = eval::score("source-copy", eval::source_copy(records), ec);
  const auto cfg = fixture_config();
  const auto read = corpus::read_revisions(fs::path(WNC_FIXTURES_DIR) / "revisions_20.jsonl");
  const auto splits = corpus::build_corpus(read.records, cfg);
  std::vector<corpus::BiasedRecord> fixture_records;
  for (const auto& p : splits.biased_full) {
    fixture_records.push_back({p.pair.rev_id, p.pair.category, p.pair.source, p.pair.target, p.labels});
  }
  const auto fixture_copy = eval::score("source-copy", eval::source_copy(fixture_records), ec);
  const bool pass = contains >= 95 && all_differ && copy_report.accuracy == 0.0 && fixture_copy.accuracy == 0.0;
  return {pass, "identical-system difference CI contains 0 in " + std::to_string(contains) +
                    "/100 seeded trials (>= 95); source-copy accuracy " + fmt("%.2f", copy_report.accuracy) +
                    " on the synthetic test split (BLEU " + fmt("%.4f", copy_report.bleu) + ") and " +
                    fmt("%.2f", fixture_copy.accuracy) + " on the corpus fixture"};
}

// ---- A11 -----------------------------------------------------------------

// Bigram toy over {EOS, a, b}: the next-token distribution depends only on
// the previous token (row 3 is the start row).
struct ToyModel {
  using State = int;
  std::vector<std::vector<double>> logp;  // [4][3]

  int initial() const { return 0; }
  int start_token() const { return 3; }
  int eos() const { return 0; }
  std::pair<std::vector<double>, State> step(const State& s, int token) const { return {logp[token], s + 1}; }
};

ToyModel random_toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ToyModel m;
  for (int row = 0; row < 4; ++row) {
    std::vector<double> p(3);
    double z = 0;
    for (auto& x : p) z += (x = u(rng));
    for (auto& x : p) x = std::log(x / z);
    m.logp.push_back(p);
  }
  return m;
}

// Best finished sequence of at most `max_tokens` symbols, by enumeration.
std::pair<std::vector<int>, double> exhaustive(const ToyModel& m, int max_tokens) {
  std::vector<int> best;
  double best_score = -INFINITY;
  for (int len = 0; len <= max_tokens; ++len) {
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<int> seq;
      double score = 0;
      int prev = m.start_token();
      for (int i = 0; i < len; ++i) {
        const int tok = 1 + ((mask >> i) & 1);
        score += m.logp[prev][tok];
        seq.push_back(tok);
        prev = tok;
      }
      score += m.logp[prev][m.eos()];
      if (score > best_score) {
        best_score = score;
        best = seq;
      }
    }
  }
  return {best, best_score};
}

Outcome a11_beam() {
  constexpr int kMaxTokens = 4;
  int exact = 0, greedy_equal = 0;
  std::string misses;
  for (int i = 0; i < 50; ++i) {
    ToyModel m = random_toy(11000 + static_cast<std::uint64_t>(i));
    const auto [best, best_score] = exhaustive(m, kMaxTokens);
    const auto beam = edit::beam_search(m, 4, kMaxTokens + 1);
    if (beam.finished && beam.tokens == best && std::abs(beam.log_prob - best_score) < 1e-12) {
      ++exact;
    } else {
      misses += " " + std::to_string(i);
    }
    const auto w1 = edit::beam_search(m, 1, kMaxTokens + 1);
    const auto greedy = edit::greedy_decode(m, kMaxTokens + 1);
    greedy_equal += w1.tokens == greedy.tokens && w1.log_prob == greedy.log_prob && w1.finished == greedy.finished;
  }

  // Width 1 against greedy on the neural decoder as well.
  Vocab vocab = Vocab::build({{"the", "senator", "was", "exposed", "as", "corrupt", "described", "."}}, 50, {});
  RunConfig cfg;
  cfg.hidden = 16;
  cfg.embed = 16;
  cfg.seed = 5;
  edit::EditorModel model(vocab, cfg);
  std::mt19937_64 rng(5);
  for (auto& p : model.params()) nn::uniform_fill(p.value, nn::real(0.5), rng);
  int neural_equal = 0;
  const std::vector<std::string> inputs = {"the senator was exposed", "the senator was exposed as corrupt .",
                                           "corrupt senator", "was the senator described as corrupt ?",
                                           "the unknown words stay copyable"};
  for (const auto& s : inputs) {
    const auto src = text::tokenize(s);
    const auto beam1 = edit::decode(model, src, "", 1, kMaxExtra);
    nn::Graph g(false);
    const auto enc = model.encode(g, src, "", nullptr, 0);
    edit::DecoderSearch search(g, model.decoder(), enc);
    const auto greedy = edit::greedy_decode(search, src.size() + kMaxExtra);
    neural_equal += beam1.ids == greedy.tokens && beam1.log_prob == greedy.log_prob;
  }
  const bool pass = exact == 50 && greedy_equal == 50 && neural_equal == static_cast<int>(inputs.size());
  std::string detail = "beam-4 equals the exhaustive argmax (<= 4 tokens + EOS) on " + std::to_string(exact) +
                       "/50 random bigram toys; width 1 equals greedy on " + std::to_string(greedy_equal) +
                       "/50 toys and " + std::to_string(neural_equal) + "/" + std::to_string(inputs.size()) +
                       " neural decodes";
  if (!misses.empty()) detail += "; missed instances:" + misses;
  return {pass, detail};
}

// ---- A12 -----------------------------------------------------------------

Outcome a12_persistence_service() {
  auto& r = synthetic();
  std::vector<std::string> problems;
  const fs::path dir = scratch_dir("persistence");

  // Round trip of every model kind on a probe batch.
  const std::vector<std::pair<std::string, const edit::Seq2Seq*>> models = {
      {"modular", r.modular.get()}, {"concurrent", r.concurrent.get()}, {"editor", r.editor.get()}};
  int probes = 0;
  for (const auto& [name, model] : models) {
    const fs::path path = dir / (name + ".ckpt");
    nn::write_checkpoint(path, model->to_checkpoint());
    const auto loaded = sys::load_system(nn::read_checkpoint(path));
    for (int i = 0; i < 20; ++i) {
      const auto& p = r.corpus.test[i];
      const auto a = edit::decode(*model, p.source, p.category, kBeam, kMaxExtra);
      const auto b = edit::decode(*loaded, p.source, p.category, kBeam, kMaxExtra);
      bool same = a.ids == b.ids && a.probabilities.size() == b.probabilities.size() &&
                  std::abs(a.log_prob - b.log_prob) <= 1e-6;
      for (std::size_t k = 0; same && k < a.probabilities.size(); ++k) {
        same = std::abs(a.probabilities[k] - b.probabilities[k]) <= 1e-6;
      }
      if (!same) problems.push_back(name + " probe " + std::to_string(i) + " differs after reload");
      ++probes;
    }
  }
  {
    const fs::path path = dir / "detector.ckpt";
    nn::write_checkpoint(path, r.detector->to_checkpoint());
    const auto loaded = detect::DetectorModel::from_checkpoint(nn::read_checkpoint(path));
    for (int i = 0; i < 20; ++i) {
      const auto& p = r.corpus.test[i];
      if (loaded.detect(p.source, p.category) != r.detector->detect(p.source, p.category)) {
        problems.push_back("detector probe " + std::to_string(i) + " differs after reload");
      }
      ++probes;
    }
  }

  // Service round trip over HTTP.
  const std::string headline = "john mccain exposed as an unprincipled politician";
  auto svc = service::NeutralizerService::from_file(dir / "modular.ckpt");
  service::HttpServer server(*svc, {"127.0.0.1", 0, "*"});
  const int port = server.bind();
  std::thread thread([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const std::string body = json{{"text", headline}, {"category", "politics"}}.dump();

  auto post = [&](const std::string& path, const std::string& payload) -> std::pair<int, std::string> {
    auto res = client.Post(path, payload, "application/json");
    if (!res) return {0, {}};
    return {res->status, res->body};
  };
  const auto health = client.Get("/api/health");
  if (!health || health->status != 200 || json::parse(health->body)["model"] != svc->model_hash()) {
    problems.push_back("health endpoint");
  }
  const auto [detect_status, detect_body] = post("/api/detect", body);
  const auto [detect_status2, detect_body2] = post("/api/detect", body);
  const auto [neutral_status, neutral_body] = post("/api/neutralize", body);
  const auto [neutral_status2, neutral_body2] = post("/api/neutralize", body);
  std::size_t n_tokens = 0;
  std::string output_text;
  if (detect_status != 200 || neutral_status != 200) {
    problems.push_back("status " + std::to_string(detect_status) + "/" + std::to_string(neutral_status));
  } else {
    const json d = json::parse(detect_body), nz = json::parse(neutral_body);
    n_tokens = d["tokens"].size();
    if (n_tokens != 7 || d["probabilities"].size() != n_tokens) problems.push_back("detect arrays not aligned");
    if (nz["tokens"] != d["tokens"] || nz["probabilities"].size() != n_tokens) {
      problems.push_back("neutralize arrays not aligned with detect");
    }
    if (nz["probabilities"] != d["probabilities"]) problems.push_back("neutralize and detect disagree on p");
    for (const auto& span : nz["changed_spans"]) {
      if (span.size() != 2 || span[0].get<std::size_t>() > span[1].get<std::size_t>() ||
          span[1].get<std::size_t>() > n_tokens) {
        problems.push_back("changed span out of range");
      }
    }
    output_text = nz["output_text"].get<std::string>();
    // A user control vector aligned to the returned tokens is accepted.
    std::vector<double> control(n_tokens, 0.0);
    control[2] = 1.0;
    const auto [ctl_status, ctl_body] =
        post("/api/neutralize", json{{"text", headline}, {"control", control}, {"merge", "replace"}}.dump());
    if (ctl_status != 200) problems.push_back("control request status " + std::to_string(ctl_status));
  }
  if (detect_body != detect_body2 || neutral_body != neutral_body2 || detect_status2 != 200 || neutral_status2 != 200) {
    problems.push_back("repeated responses differ");
  }
  server.stop();
  thread.join();

  std::string detail = std::to_string(probes) + " probe decodes identical after reload (modular, concurrent, editor, "
                       "detector); HTTP detect/neutralize on the headline: " + std::to_string(n_tokens) +
                       " aligned tokens, repeated responses identical, output \"" + output_text + "\"";
  for (const auto& p : problems) detail += "\n    " + p;
  return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string id; std::getline(ss, id, ',');) only.insert(id);
    } else {
      std::fprintf(stderr, "usage: %s [--only A1,A2,...]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::tuple<std::string, std::string, std::function<Outcome()>>> criteria = {
      {"A1", "gradient correctness", a1_gradients},
      {"A2", "corpus pipeline golden test", a2_corpus_golden},
      {"A3", "BLEU oracle equivalence", a3_bleu_oracle},
      {"A4", "noise model contract", a4_noise},
      {"A5", "autoencoder memorization", a5_autoencoder},
      {"A6", "synthetic end-to-end", a6_synthetic},
      {"A7", "join-embedding identities", a7_join_identities},
      {"A8", "control efficacy", a8_control},
      {"A9", "weighted-loss law", a9_weighted_loss},
      {"A10", "evaluation statistics", a10_evaluation},
      {"A11", "beam correctness", a11_beam},
      {"A12", "persistence and service", a12_persistence_service},
  };
  int failed = 0, ran = 0;
  for (const auto& [id, title, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %s  %s: %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
    ++ran;
  }
  std::error_code ec;
  fs::remove_all(fs::temp_directory_path() / ("wnc-acceptance-" + std::to_string(::getpid())), ec);
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
