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

#include "wnc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wnc/bleu.hpp"
#include "wnc/detector.hpp"

namespace wnc::eval {

using nlohmann::json;

double exact_match_accuracy(const std::vector<Tokens>& outputs, const std::vector<Tokens>& references) {
  if (outputs.size() != references.size()) {
    throw std::invalid_argument("exact match needs equal-length lists (" + std::to_string(outputs.size()) + " vs " +
                                std::to_string(references.size()) + ")");
  }
  if (outputs.empty()) throw std::invalid_argument("exact match of an empty list");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) hit += outputs[i] == references[i];
  return static_cast<double>(hit) / static_cast<double>(outputs.size());
}

double detection_accuracy(const std::vector<std::vector<double>>& probabilities,
                          const std::vector<std::vector<int>>& labels) {
  if (probabilities.size() != labels.size() || probabilities.empty()) {
    throw std::invalid_argument("detection accuracy needs equal-length, non-empty lists");
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (probabilities[i].size() != labels[i].size()) throw std::invalid_argument("probability/label length mismatch");
    if (std::count(labels[i].begin(), labels[i].end(), 1) != 1) {
      throw std::invalid_argument("detection accuracy needs exactly one labeled word per pair");
    }
    hit += labels[i][detect::select_top_word(probabilities[i])] == 1;
  }
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

Interval bootstrap_ci(std::size_t n, const IndexMetric& metric, int resamples, double level, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("bootstrap needs at least 2 examples");
  if (resamples < 1) throw std::invalid_argument("bootstrap needs at least one resample");
  if (!(level > 0 && level < 1)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> idx(n);
  for (int r = 0; r < resamples; ++r) {
    for (auto& i : idx) i = pick(rng);
    stats.push_back(metric(idx));
  }
  std::sort(stats.begin(), stats.end());
  const auto at = [&](double q) {
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(stats.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, stats.size());
    return stats[rank - 1];
  };
  const double tail = (1 - level) / 2;
  return {at(tail), at(1 - tail), level};
}

Interval bootstrap_mean_ci(const std::vector<double>& scores, int resamples, double level, std::uint64_t seed) {
  return bootstrap_ci(
      scores.size(),
      [&](const std::vector<std::size_t>& idx) {
        double s = 0;
        for (auto i : idx) s += scores[i];
        return s / static_cast<double>(idx.size());
      },
      resamples, level, seed);
}

Interval bootstrap_difference_ci(const std::vector<double>& a, const std::vector<double>& b, int resamples,
                                 double level, std::uint64_t seed) {
  if (a.size() != b.size()) throw std::invalid_argument("paired bootstrap needs equal-length score lists");
  return bootstrap_ci(
      a.size(),
      [&](const std::vector<std::size_t>& idx) {
        double s = 0;
        for (auto i : idx) s += a[i] - b[i];
        return s / static_cast<double>(idx.size());
      },
      resamples, level, seed);
}

Interval bootstrap_bleu_ci(const std::vector<Tokens>& outputs, const std::vector<Tokens>& references, int resamples,
                           double level, std::uint64_t seed) {
  if (outputs.size() != references.size()) throw std::invalid_argument("BLEU bootstrap needs equal-length lists");
  // Per-example statistics pooled per resample instead of re-counting n-grams.
  std::vector<text::BleuStats> per;
  per.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) per.push_back(text::bleu_stats(outputs[i], references[i]));
  return bootstrap_ci(
      outputs.size(),
      [&](const std::vector<std::size_t>& idx) {
        text::BleuStats total = per[idx[0]];
        for (std::size_t k = 1; k < idx.size(); ++k) total.add(per[idx[k]]);
        return text::bleu_from_stats(total);
      },
      resamples, level, seed);
}

json EvalConfig::to_json() const {
  return {{"beam", beam}, {"max_extra_len", max_extra_len}, {"resamples", resamples},
          {"level", level}, {"seed", seed},                 {"threads", threads}};
}

namespace {

// Percentile intervals of a biased statistic (corpus BLEU) can miss the
// point estimate; widen to include it.
Interval including(Interval i, double point) {
  i.low = std::min(i.low, point);
  i.high = std::max(i.high, point);
  return i;
}

json interval_json(const Interval& i) { return {{"low", i.low}, {"high", i.high}, {"level", i.level}}; }

}  // namespace

json EvalReport::to_json() const {
  json j = {{"system", system},
            {"bleu", bleu},
            {"accuracy", accuracy},
            {"bleu_ci", interval_json(bleu_ci)},
            {"accuracy_ci", interval_json(accuracy_ci)},
            {"n_examples", n_examples},
            {"n_detection", n_detection},
            {"config", config}};
  j["detection_accuracy"] = detection_accuracy ? json(*detection_accuracy) : json(nullptr);
  j["detection_ci"] = detection_ci ? interval_json(*detection_ci) : json(nullptr);
  return j;
}

EvalReport score(const std::string& system, const std::vector<ExampleResult>& examples, const EvalConfig& cfg) {
  if (examples.empty()) throw std::invalid_argument("cannot score an empty test split");
  EvalReport r;
  r.system = system;
  r.n_examples = examples.size();
  r.config = cfg.to_json();

  std::vector<Tokens> outs, refs;
  std::vector<double> correct;
  for (const auto& e : examples) {
    outs.push_back(e.output);
    refs.push_back(e.reference);
    correct.push_back(e.output == e.reference ? 1.0 : 0.0);
  }
  std::vector<std::pair<Tokens, Tokens>> pairs;
  for (std::size_t i = 0; i < outs.size(); ++i) pairs.emplace_back(outs[i], refs[i]);
  r.bleu = text::corpus_bleu(pairs);
  r.accuracy = exact_match_accuracy(outs, refs);

  std::vector<double> det_hits;
  for (const auto& e : examples) {
    if (e.probabilities.empty() || std::count(e.labels.begin(), e.labels.end(), 1) != 1) continue;
    det_hits.push_back(e.labels[detect::select_top_word(e.probabilities)] == 1 ? 1.0 : 0.0);
  }
  r.n_detection = det_hits.size();
  if (!det_hits.empty()) {
    double s = 0;
    for (double h : det_hits) s += h;
    r.detection_accuracy = s / static_cast<double>(det_hits.size());
  }

  if (examples.size() >= 2) {
    r.bleu_ci = including(bootstrap_bleu_ci(outs, refs, cfg.resamples, cfg.level, cfg.seed), r.bleu);
    r.accuracy_ci = including(bootstrap_mean_ci(correct, cfg.resamples, cfg.level, cfg.seed + 1), r.accuracy);
  } else {
    r.bleu_ci = {r.bleu, r.bleu, cfg.level};
    r.accuracy_ci = {r.accuracy, r.accuracy, cfg.level};
  }
  if (det_hits.size() >= 2) {
    r.detection_ci = including(bootstrap_mean_ci(det_hits, cfg.resamples, cfg.level, cfg.seed + 2), *r.detection_accuracy);
  } else if (r.detection_accuracy) {
    r.detection_ci = Interval{*r.detection_accuracy, *r.detection_accuracy, cfg.level};
  }
  return r;
}

std::vector<ExampleResult> decode_all(const edit::Seq2Seq& model, const std::vector<corpus::BiasedRecord>& test,
                                      const EvalConfig& cfg) {
  std::vector<ExampleResult> out(test.size());
  auto work = [&](std::size_t i) {
    const auto& rec = test[i];
    const auto d = edit::decode(model, rec.source, rec.category, cfg.beam, cfg.max_extra_len);
    out[i] = {rec.rev_id, rec.category, rec.source.norms(), rec.target.norms(), d.tokens, rec.labels, d.probabilities};
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(test.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < test.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < test.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

EvalReport evaluate_system(const edit::Seq2Seq& model, const std::vector<corpus::BiasedRecord>& test,
                           const EvalConfig& cfg, std::vector<ExampleResult>* examples) {
  auto results = decode_all(model, test, cfg);
  EvalReport r = score(model.kind(), results, cfg);
  if (examples) *examples = std::move(results);
  return r;
}

std::vector<ExampleResult> source_copy(const std::vector<corpus::BiasedRecord>& test) {
  std::vector<ExampleResult> out;
  out.reserve(test.size());
  for (const auto& rec : test) {
    out.push_back({rec.rev_id, rec.category, rec.source.norms(), rec.target.norms(), rec.source.norms(), rec.labels, {}});
  }
  return out;
}

void write_report(const std::filesystem::path& path, const std::vector<EvalReport>& reports,
                  const std::vector<ExampleResult>& examples) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  for (const auto& e : examples) {
    json j = {{"type", "example"},  {"rev_id", e.rev_id},       {"category", e.category},
              {"source", e.source}, {"reference", e.reference}, {"output", e.output},
              {"exact", e.output == e.reference}};
    if (!e.probabilities.empty()) j["probabilities"] = e.probabilities;
    out << j.dump() << '\n';
  }
  for (const auto& r : reports) {
    json j = r.to_json();
    j["type"] = "summary";
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.2f", 100 * v);
    return std::string(buf);
  };
  auto ci = [&](const Interval& i) { return "[" + pct(i.low) + "," + pct(i.high) + "]"; };
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %6s  %-17s %6s  %-17s %6s  %6s\n", "system", "BLEU", "95% CI", "Acc",
                "95% CI", "Det", "n");
  os << line;
  for (const auto& r : reports) {
    const std::string det = r.detection_accuracy ? pct(*r.detection_accuracy) : "     -";
    std::snprintf(line, sizeof line, "%-12s %s  %-17s %s  %-17s %s  %6zu\n", r.system.c_str(), pct(r.bleu).c_str(),
                  ci(r.bleu_ci).c_str(), pct(r.accuracy).c_str(), ci(r.accuracy_ci).c_str(), det.c_str(),
                  r.n_examples);
    os << line;
  }
  return os.str();
}

}  // namespace wnc::eval
