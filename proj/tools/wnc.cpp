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

// wnc: command-line front end for corpus building, training, decoding,
// evaluation and the HTTP service.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

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

// Bad user input detected after parsing; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

// Options shared by every training command. Flags left unset keep the
// value from --config (or the RunConfig default).
struct TrainFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr, pretrain_lr, dropout;
  std::optional<int> threads, batch, hidden;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "RunConfig JSON file to start from")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--lr", lr, "learning rate (supervised training)");
    cmd->add_option("--pretrain-lr", pretrain_lr, "learning rate (pretraining)");
    cmd->add_option("--dropout", dropout, "dropout probability");
    cmd->add_option("--threads", threads, "worker threads per batch");
    cmd->add_option("--batch", batch, "batch size");
    cmd->add_option("--hidden", hidden, "hidden size h (also embedding and encoder size)");
  }

  RunConfig build() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_json(read_json_file(config_path));
    if (seed) cfg.seed = *seed;
    if (lr) cfg.lr = *lr;
    if (pretrain_lr) cfg.pretrain_lr = *pretrain_lr;
    if (dropout) cfg.dropout = *dropout;
    if (threads) cfg.threads = *threads;
    if (batch) cfg.batch = *batch;
    if (hidden) cfg.hidden = cfg.embed = cfg.encoder_dim = *hidden;
    return cfg;
  }
};

// vocab.json next to `data` when --vocab is not given, else built from the inputs.
Vocab resolve_vocab(const std::string& vocab_path, const fs::path& data, const std::vector<corpus::BiasedRecord>& biased,
                    const std::vector<corpus::NeutralRecord>& neutral, std::size_t cap) {
  if (!vocab_path.empty()) return Vocab::from_json(read_json_file(vocab_path));
  const fs::path sibling = data.parent_path() / "vocab.json";
  if (fs::exists(sibling)) {
    spdlog::info("using vocabulary {}", sibling.string());
    return Vocab::from_json(read_json_file(sibling));
  }
  spdlog::info("building vocabulary from the training inputs");
  return pipeline::build_vocab(biased, neutral, cap);
}

std::vector<double> parse_control(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--control: '" + item + "' is not a number");
    }
  }
  return out;
}

std::string fmt_prob(double p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << p;
  return os.str();
}

int steps_for_epochs(int epochs, std::size_t n, int batch) {
  const auto per_epoch = static_cast<int>((n + static_cast<std::size_t>(batch) - 1) / static_cast<std::size_t>(batch));
  return std::max(1, epochs * per_epoch);
}

// ---- subcommands ------------------------------------------------------------

struct BuildCorpus {
  std::string input, out_dir, wordlist;
  int window = 5;
  std::size_t min_edit = 4;
  double percentile = 95;
  std::uint64_t seed = 0;
  std::size_t vocab_cap = 5000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "revision pairs, one JSON object per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", out_dir, "output directory")->required();
    cmd->add_option("--window", window, "alignment window")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--min-edit", min_edit, "minimum character edit distance")->capture_default_str();
    cmd->add_option("--length-percentile", percentile, "length-ratio percentile")
        ->capture_default_str()
        ->check(CLI::Range(1.0, 100.0));
    cmd->add_option("--seed", seed, "echoed into stats.json")->capture_default_str();
    cmd->add_option("--wordlist", wordlist, "spelling word list (default: data/wordlist.txt if present)");
    cmd->add_option("--vocab-size", vocab_cap, "vocabulary cap for vocab.json")->capture_default_str();
  }

  int run() const {
    corpus::CorpusConfig cfg;
    cfg.window = window;
    cfg.filters.min_edit = min_edit;
    cfg.length_percentile = percentile;
    cfg.seed = seed;
    std::string words = wordlist;
    if (words.empty() && fs::exists("data/wordlist.txt")) words = "data/wordlist.txt";
    if (!words.empty()) cfg.filters.wordlist = corpus::load_wordlist(words);

    auto read = corpus::read_revisions(fs::path(input));
    auto splits = corpus::build_corpus(read.records, cfg);
    splits.stats.malformed = read.malformed;
    corpus::write_corpus(splits, cfg, out_dir);

    std::vector<corpus::BiasedRecord> biased;
    for (const auto& p : splits.biased_full) {
      biased.push_back({p.pair.rev_id, p.pair.category, p.pair.source, p.pair.target, p.labels});
    }
    const Vocab vocab = pipeline::build_vocab(biased, splits.neutral, vocab_cap);
    write_json_file(fs::path(out_dir) / "vocab.json", vocab.to_json());

    const auto& s = splits.stats;
    std::cout << "revisions " << s.revisions << " (malformed " << s.malformed << ")\n"
              << "biased_full " << s.biased_full.pairs << "  biased_word " << s.biased_word.pairs << "  neutral "
              << s.neutral.pairs << "\n";
    for (const auto& [rule, n] : s.rejects) std::cout << "  rejected " << rule << ": " << n << "\n";
    return 0;
  }
};

struct GenerateSynthetic {
  std::string out_dir;
  synth::SyntheticConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "output directory")->required();
    cmd->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    cmd->add_option("--train", cfg.train_pairs, "training pairs")->capture_default_str();
    cmd->add_option("--test", cfg.test_pairs, "test pairs")->capture_default_str();
    cmd->add_option("--neutral", cfg.neutral_sentences, "neutral sentences")->capture_default_str();
  }

  int run() const {
    const auto c = synth::generate(cfg);
    const fs::path dir(out_dir);
    fs::create_directories(dir / "lexicons");
    auto dump = [&](const fs::path& p, const std::vector<corpus::BiasedRecord>& recs) {
      std::ofstream out(p);
      for (const auto& r : recs) {
        out << json{{"rev_id", r.rev_id},
                    {"category", r.category},
                    {"src_tokens", r.source.norms()},
                    {"tgt_tokens", r.target.norms()},
                    {"labels", r.labels},
                    {"src_raw", r.source.raw},
                    {"tgt_raw", r.target.raw}}
                   .dump()
            << '\n';
      }
    };
    const auto train = pipeline::to_records(c.train, "train-");
    const auto test = pipeline::to_records(c.test, "test-");
    const auto neutral = pipeline::to_records(c.neutral);
    dump(dir / "train.jsonl", train);
    dump(dir / "test.jsonl", test);
    {
      std::ofstream out(dir / "neutral.jsonl");
      for (const auto& r : neutral) out << corpus::to_json(r).dump() << '\n';
    }
    for (const auto& lex : c.lexicons) {
      std::ofstream out(dir / "lexicons" / (lex.name + ".txt"));
      for (const auto& t : lex.terms) out << t << '\n';
    }
    write_json_file(dir / "vocab.json", pipeline::build_vocab(train, neutral, 5000).to_json());
    std::cout << "wrote " << train.size() << " train, " << test.size() << " test, " << neutral.size()
              << " neutral records to " << dir.string() << "\n";
    return 0;
  }
};

struct TrainDetector {
  std::string corpus_path, lexicon_dir, out, vocab_path, neutral_path;
  int epochs = 4;
  int mlm_steps = 0;
  TrainFlags flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("--corpus", corpus_path, "labeled biased pairs (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--lexicons", lexicon_dir, "directory of lexicon word lists")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
    cmd->add_option("--out", out, "checkpoint to write")->required();
    cmd->add_option("--vocab", vocab_path, "vocabulary JSON (default: vocab.json beside the corpus)");
    cmd->add_option("--neutral", neutral_path, "neutral sentences for masked-token pretraining")
        ->check(CLI::ExistingFile);
    cmd->add_option("--mlm-steps", mlm_steps, "masked-token pretraining steps (needs --neutral)")->capture_default_str();
    flags.attach(cmd);
  }

  int run() const {
    if (mlm_steps > 0 && neutral_path.empty()) throw UsageError("--mlm-steps needs --neutral");
    RunConfig cfg = flags.build();
    cfg.detector_epochs = epochs;
    const auto records = corpus::read_biased(corpus_path);
    if (records.empty()) throw UsageError("--corpus: no records in " + corpus_path);
    std::vector<corpus::NeutralRecord> neutral;
    if (!neutral_path.empty()) neutral = corpus::read_neutral(neutral_path);
    Vocab vocab = resolve_vocab(vocab_path, corpus_path, records, neutral, static_cast<std::size_t>(cfg.vocab_cap));
    cfg.categories = vocab.categories();
    detect::DetectorModel model(std::move(vocab), detect::load_lexicons(lexicon_dir), cfg);

    if (mlm_steps > 0) {
      const auto report = detect::masked_lm_pretrain(model.params(), model.net().encoder(),
                                                     pipeline::mlm_corpus(model.vocab(), neutral), cfg.mask_prob,
                                                     mlm_steps, cfg);
      spdlog::info("masked-token pretraining: recovery accuracy {:.3f}", report.recovery_accuracy);
    }
    const auto report = detect::train_detector(model, pipeline::labeled_examples(records));
    nn::write_checkpoint(out, model.to_checkpoint());
    std::cout << "loss " << report.epoch_losses.front() << " -> " << report.epoch_losses.back() << "\nwrote " << out
              << "\n";
    return 0;
  }
};

struct PretrainEditor {
  std::string neutral_path, out, vocab_path;
  int epochs = 4;
  int k = 3;
  double p_drop = 0.25;
  std::optional<int> steps;
  TrainFlags flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("--neutral", neutral_path, "neutral sentences (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--epochs", epochs, "passes over the neutral corpus")->capture_default_str();
    cmd->add_option("--steps", steps, "exact number of batches (overrides --epochs)");
    cmd->add_option("--k", k, "maximum shuffle displacement")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--p-drop", p_drop, "word-drop probability")->capture_default_str()->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--out", out, "checkpoint to write")->required();
    cmd->add_option("--vocab", vocab_path, "vocabulary JSON (default: vocab.json beside the neutral file)");
    flags.attach(cmd);
  }

  int run() const {
    RunConfig cfg = flags.build();
    cfg.shuffle_k = k;
    cfg.p_drop = p_drop;
    cfg.editor_epochs = epochs;
    const auto neutral = corpus::read_neutral(neutral_path);
    if (neutral.empty()) throw UsageError("--neutral: no sentences in " + neutral_path);
    Vocab vocab = resolve_vocab(vocab_path, neutral_path, {}, neutral, static_cast<std::size_t>(cfg.vocab_cap));
    cfg.categories = vocab.categories();
    edit::EditorModel model(std::move(vocab), cfg);
    const int n_steps = steps ? *steps : steps_for_epochs(epochs, neutral.size(), cfg.batch);
    const auto curve = edit::pretrain_autoencoder(model, pipeline::sentences(neutral), n_steps, {k, p_drop});
    nn::write_checkpoint(out, model.to_checkpoint());
    std::cout << "steps " << n_steps << "  reconstruction accuracy " << fmt_prob(curve.token_accuracy) << "\nwrote "
              << out << "\n";
    return 0;
  }
};

struct Train {
  std::string mode = "modular", join = "gate", corpus_path, detector, editor, out, neutral_path;
  int steps = 25000;
  int pretrain_steps = 0;
  double alpha = 1.3;
  int beam = 4;
  TrainFlags flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "system type")->capture_default_str()->check(CLI::IsMember({"modular", "concurrent"}));
    cmd->add_option("--join", join, "MODULAR join")->capture_default_str()->check(CLI::IsMember({"gate", "concat"}));
    cmd->add_option("--corpus", corpus_path, "parallel biased pairs (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--detector", detector, "detector checkpoint")->check(CLI::ExistingFile);
    cmd->add_option("--editor", editor, "pretrained editor checkpoint (modular)")->check(CLI::ExistingFile);
    cmd->add_option("--neutral", neutral_path, "neutral sentences for CONCURRENT denoising pretraining")
        ->check(CLI::ExistingFile);
    cmd->add_option("--pretrain-steps", pretrain_steps, "CONCURRENT denoising steps")->capture_default_str();
    cmd->add_option("--steps", steps, "fine-tuning steps")->capture_default_str();
    cmd->add_option("--alpha", alpha, "weight on target tokens absent from the source")->capture_default_str();
    cmd->add_option("--beam", beam, "beam width stored for decoding")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "checkpoint to write")->required();
    flags.attach(cmd);
  }

  int run() const {
    RunConfig cfg = flags.build();
    cfg.mode = mode;
    cfg.join = join;
    cfg.alpha = alpha;
    cfg.beam = beam;
    cfg.finetune_steps = steps;
    const auto records = corpus::read_biased(corpus_path);
    if (records.empty()) throw UsageError("--corpus: no records in " + corpus_path);
    const auto examples = pipeline::parallel_examples(records);

    std::unique_ptr<edit::Seq2Seq> model;
    if (mode == "modular") {
      if (detector.empty() || editor.empty()) throw UsageError("--mode modular needs --detector and --editor");
      const auto det = nn::read_checkpoint(detector);
      const auto det_cfg = json::parse(det.config);
      const Vocab vocab = Vocab::from_json(det_cfg.at("vocab"));
      cfg.categories = vocab.categories();
      // Model sizes follow the pretrained halves.
      const auto pre = RunConfig::from_json(det_cfg.at("run_config"));
      cfg.hidden = pre.hidden, cfg.embed = pre.embed, cfg.encoder_dim = pre.encoder_dim;
      cfg.encoder_layers = pre.encoder_layers, cfg.encoder_ffn = pre.encoder_ffn, cfg.max_positions = pre.max_positions;
      auto m = std::make_unique<sys::ModularSystem>(vocab, detect::lexicons_from_json(det_cfg.at("lexicons")), cfg);
      m->load_detector(det);
      m->load_editor(nn::read_checkpoint(editor));
      model = std::move(m);
    } else {
      if (detector.empty()) throw UsageError("--mode concurrent needs --detector");
      if (!editor.empty()) spdlog::warn("--editor is ignored in concurrent mode");
      if (join != "gate") throw UsageError("--join applies to modular mode only");
      const auto det = nn::read_checkpoint(detector);
      const auto det_cfg = json::parse(det.config);
      const Vocab vocab = Vocab::from_json(det_cfg.at("vocab"));
      cfg.categories = vocab.categories();
      const auto pre = RunConfig::from_json(det_cfg.at("run_config"));
      cfg.encoder_dim = pre.encoder_dim, cfg.encoder_layers = pre.encoder_layers, cfg.encoder_ffn = pre.encoder_ffn;
      cfg.max_positions = pre.max_positions;
      auto c = std::make_unique<sys::ConcurrentSystem>(vocab, cfg);
      c->load_encoder_from_detector(det);
      if (pretrain_steps > 0) {
        if (neutral_path.empty()) throw UsageError("--pretrain-steps needs --neutral");
        const auto curve = edit::pretrain_autoencoder(*c, pipeline::sentences(corpus::read_neutral(neutral_path)),
                                                      pretrain_steps, {cfg.shuffle_k, cfg.p_drop});
        spdlog::info("denoising pretraining: reconstruction accuracy {:.3f}", curve.token_accuracy);
      }
      model = std::move(c);
    }
    const auto curve = edit::fine_tune(*model, examples, steps);
    nn::write_checkpoint(out, model->to_checkpoint());
    if (!curve.losses.empty()) std::cout << "loss " << curve.losses.front() << " -> " << curve.losses.back() << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
  }
};

std::string default_model() {
  const char* env = std::getenv(service::kModelEnv);
  return env ? env : "";
}

std::string require_model(const std::string& model) {
  if (!model.empty()) return model;
  throw UsageError(std::string("--model is required (or set ") + service::kModelEnv + ")");
}

struct Neutralize {
  std::string model, text, category = "unknown", control, merge = "replace";
  std::optional<int> beam;
  bool as_json = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "system checkpoint")->default_str("$NEUTRALIZE_MODEL");
    cmd->add_option("--text", text, "sentence to neutralize")->required();
    cmd->add_option("--category", category, "topic category")->capture_default_str();
    cmd->add_option("--control", control, "comma-separated per-token probabilities");
    cmd->add_option("--merge", merge, "control merge rule")->capture_default_str()->check(CLI::IsMember({"replace", "max"}));
    cmd->add_option("--beam", beam, "beam width (default: from the checkpoint)")->check(CLI::PositiveNumber);
    cmd->add_flag("--json", as_json, "print the API response body");
  }

  int run() const {
    const auto path = require_model(model.empty() ? default_model() : model);
    auto svc = service::NeutralizerService::from_file(path, beam.value_or(0));
    json body = {{"text", text}, {"category", category}, {"merge", merge}};
    if (!control.empty()) body["control"] = parse_control(control);
    const auto r = svc->neutralize(body.dump());
    if (r.status != 200) throw UsageError(r.body.value("code", "error") + ": " + r.body.value("message", ""));
    if (as_json) {
      std::cout << r.body.dump() << "\n";
      return 0;
    }
    const auto& toks = r.body["tokens"];
    const auto& probs = r.body["probabilities"];
    for (std::size_t i = 0; i < toks.size(); ++i) {
      std::cout << std::left << std::setw(18) << toks[i].get<std::string>();
      if (i < probs.size()) std::cout << fmt_prob(probs[i].get<double>());
      std::cout << "\n";
    }
    std::cout << "output: " << r.body["output_text"].get<std::string>() << "\n";
    return 0;
  }
};

struct Detect {
  std::string model, text, category = "unknown";

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "detector or MODULAR checkpoint")->default_str("$NEUTRALIZE_MODEL");
    cmd->add_option("--text", text, "sentence to score")->required();
    cmd->add_option("--category", category, "topic category")->capture_default_str();
  }

  int run() const {
    const auto path = require_model(model.empty() ? default_model() : model);
    const auto ckpt = nn::read_checkpoint(path);
    const auto sentence = text::tokenize(text);
    std::vector<double> p;
    if (sys::checkpoint_kind(ckpt) == "detector") {
      p = detect::DetectorModel::from_checkpoint(ckpt).detect(sentence, category);
    } else if (sys::checkpoint_kind(ckpt) == "modular") {
      p = sys::ModularSystem::from_checkpoint(ckpt)->detect(sentence, category);
    } else {
      throw UsageError("--model: a '" + sys::checkpoint_kind(ckpt) + "' checkpoint has no detector");
    }
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      std::cout << std::left << std::setw(18) << sentence.tokens[i].surface << fmt_prob(p[i]) << "\n";
    }
    std::cout << "top: " << sentence.tokens[detect::select_top_word(p)].surface << "\n";
    return 0;
  }
};

struct Evaluate {
  std::string model, test, out;
  eval::EvalConfig cfg;
  std::optional<int> beam;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "system checkpoint")->default_str("$NEUTRALIZE_MODEL");
    cmd->add_option("--test", test, "test pairs (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--resamples", cfg.resamples, "bootstrap resamples")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "bootstrap seed")->capture_default_str();
    cmd->add_option("--out", out, "report file (JSONL)")->required();
    cmd->add_option("--beam", beam, "beam width (default: from the checkpoint)")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", cfg.threads, "decoding threads")->capture_default_str()->check(CLI::PositiveNumber);
  }

  int run() {
    const auto path = require_model(model.empty() ? default_model() : model);
    auto system = sys::load_system(nn::read_checkpoint(path));
    cfg.beam = beam ? *beam : system->run_config().beam;
    cfg.max_extra_len = system->run_config().max_extra_len;
    const auto records = corpus::read_biased(test);
    if (records.empty()) throw UsageError("--test: no records in " + test);

    std::vector<eval::ExampleResult> examples;
    auto report = eval::evaluate_system(*system, records, cfg, &examples);
    report.config["model"] = path;
    report.config["test"] = test;
    auto baseline = eval::score("source-copy", eval::source_copy(records), cfg);
    baseline.config["test"] = test;
    eval::write_report(out, {report, baseline}, examples);
    std::cout << eval::format_table({report, baseline});
    return 0;
  }
};

struct Serve {
  std::string model;
  service::ServeOptions opts;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "system checkpoint")->default_str("$NEUTRALIZE_MODEL");
    cmd->add_option("--host", opts.host, "bind address")->capture_default_str();
    cmd->add_option("--port", opts.port, "port")->capture_default_str()->check(CLI::Range(1, 65535));
    cmd->add_option("--cors-origin", opts.cors_origin, "allowed browser origin")->capture_default_str();
  }

  int run() const {
    auto svc = service::NeutralizerService::from_file(require_model(model.empty() ? default_model() : model));
    service::serve(*svc, opts);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wnc: detect and neutralize subjective bias in encyclopedic sentences"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only log warnings and errors");

  BuildCorpus build_corpus;
  GenerateSynthetic generate;
  TrainDetector train_detector;
  PretrainEditor pretrain_editor;
  Train train;
  Neutralize neutralize;
  Detect detect_cmd;
  Evaluate evaluate;
  Serve serve;

  std::function<int()> action;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.attach(sub);
    sub->callback([&action, &cmd] { action = [&cmd] { return cmd.run(); }; });
  };
  add("build-corpus", "build the biased-full, biased-word and neutral splits from revision pairs", build_corpus);
  add("generate-synthetic", "write a small synthetic corpus with planted bias markers", generate);
  add("train-detector", "train the token-level bias detector", train_detector);
  add("pretrain-editor", "pretrain the editor as a denoising autoencoder", pretrain_editor);
  add("train", "fine-tune a MODULAR or CONCURRENT system end to end", train);
  add("neutralize", "rewrite one sentence", neutralize);
  add("detect", "print per-token bias probabilities", detect_cmd);
  add("evaluate", "score a system on a test split with bootstrap intervals", evaluate);
  add("serve", "run the HTTP API", serve);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known |= sub->get_name() == argv[1];
    if (!known) {
      std::cerr << "wnc: error[usage]: unknown subcommand '" << argv[1] << "'\n" << app.help();
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "wnc: error[usage]: " << e.what() << "\n" << app.help();
    return 2;
  }

  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
  try {
    return action ? action() : 2;
  } catch (const UsageError& e) {
    std::cerr << "wnc: error[usage]: " << e.what() << "\n";
    return 2;
  } catch (const nn::CheckpointError& e) {
    std::cerr << "wnc: error[checkpoint]: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wnc: error[invalid]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wnc: error[runtime]: " << e.what() << "\n";
    return 1;
  }
}
