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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wnc {

// Every hyperparameter of a run. Defaults follow the published training
// protocol except the model sizes, which are desk-scale (the published
// models use h = 512).
struct RunConfig {
  // Model sizes.
  int hidden = 64;
  int embed = 64;
  int encoder_dim = 64;
  int encoder_layers = 2;
  int encoder_ffn = 128;
  int max_positions = 256;
  int vocab_cap = 5000;

  // Optimization.
  double lr = 5e-5;
  double pretrain_lr = 5e-5;
  int batch = 16;
  double clip_norm = 3.0;
  double dropout = 0.2;
  int threads = 1;

  // Losses.
  double alpha = 1.3;
  double coverage_weight = 1.0;

  // Denoising noise model.
  int shuffle_k = 3;
  double p_drop = 0.25;

  // Masked-token pretraining of the contextual encoder.
  int mlm_steps = 0;
  double mask_prob = 0.15;

  // Schedules.
  int detector_epochs = 4;
  int editor_epochs = 4;
  int finetune_steps = 25000;

  // Decoding.
  int beam = 4;
  int max_extra_len = 10;

  // System shape.
  std::string mode = "modular";   // modular | concurrent
  std::string join = "gate";      // gate | concat
  std::string merge = "replace";  // replace | max

  std::uint64_t seed = 1;
  std::vector<std::string> categories;
  std::map<std::string, std::string> paths;

  nlohmann::json to_json() const;
  // Throws std::invalid_argument on unknown keys or ill-typed values.
  static RunConfig from_json(const nlohmann::json& j);
  // Checks ranges and cross-field rules; throws std::invalid_argument.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace wnc
