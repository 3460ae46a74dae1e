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

#include "wnc/config.hpp"

#include <set>
#include <stdexcept>

namespace wnc {

#define WNC_CONFIG_FIELDS(X) \
  X(hidden)                  \
  X(embed)                   \
  X(encoder_dim)             \
  X(encoder_layers)          \
  X(encoder_ffn)             \
  X(max_positions)           \
  X(vocab_cap)               \
  X(lr)                      \
  X(pretrain_lr)             \
  X(batch)                   \
  X(clip_norm)               \
  X(dropout)                 \
  X(threads)                 \
  X(alpha)                   \
  X(coverage_weight)         \
  X(shuffle_k)               \
  X(p_drop)                  \
  X(mlm_steps)               \
  X(mask_prob)               \
  X(detector_epochs)         \
  X(editor_epochs)           \
  X(finetune_steps)          \
  X(beam)                    \
  X(max_extra_len)           \
  X(mode)                    \
  X(join)                    \
  X(merge)                   \
  X(seed)                    \
  X(categories)              \
  X(paths)

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
#define X(name) j[#name] = name;
  WNC_CONFIG_FIELDS(X)
#undef X
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("run config must be an object");
  static const std::set<std::string> known = {
#define X(name) #name,
      WNC_CONFIG_FIELDS(X)
#undef X
  };
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("run config: unknown key '" + key + "'");
  }
  RunConfig c;
  try {
#define X(name) \
  if (j.contains(#name)) j.at(#name).get_to(c.name);
    WNC_CONFIG_FIELDS(X)
#undef X
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("run config: ") + e.what());
  }
  return c;
}

#undef WNC_CONFIG_FIELDS

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("run config: " + msg);
  };
  require(hidden > 0 && embed > 0 && encoder_dim > 0, "model sizes must be positive");
  require(encoder_layers >= 1 && encoder_ffn > 0 && max_positions > 1, "encoder shape must be positive");
  require(vocab_cap > 0, "vocab_cap must be positive");
  require(lr > 0 && pretrain_lr > 0, "learning rates must be positive");
  require(batch >= 1, "batch must be >= 1");
  require(clip_norm > 0, "clip_norm must be positive");
  require(dropout >= 0 && dropout < 1, "dropout must be in [0,1)");
  require(threads >= 1, "threads must be >= 1");
  require(alpha >= 1, "alpha must be >= 1");
  require(coverage_weight >= 0, "coverage_weight must be >= 0");
  require(shuffle_k >= 0, "shuffle_k must be >= 0");
  require(p_drop >= 0 && p_drop < 1, "p_drop must be in [0,1)");
  require(mask_prob >= 0 && mask_prob <= 1, "mask_prob must be in [0,1]");
  require(beam >= 1, "beam must be >= 1");
  require(mode == "modular" || mode == "concurrent", "mode must be modular or concurrent");
  require(join == "gate" || join == "concat", "join must be gate or concat");
  require(merge == "replace" || merge == "max", "merge must be replace or max");
  require(join == "gate" || mode == "modular", "concat join is only valid in modular mode");
}

}  // namespace wnc
