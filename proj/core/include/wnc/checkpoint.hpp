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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnc/tensor.hpp"

namespace wnc::nn {

// Binary container shared by every model:
//   magic "WNCM1\0" | u16 version | u32 length + UTF-8 config blob |
//   per tensor: u32 length + name, u8 rank, u32 dims[rank], f32 LE payload.
inline constexpr char kCheckpointMagic[6] = {'W', 'N', 'C', 'M', '1', '\0'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kVersion, kCorrupt, kMissingTensor };
  CheckpointError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Checkpoint {
  std::uint16_t version = kCheckpointVersion;
  std::string config;  // structured-text (JSON) blob
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes);

// Copies every parameter of `params` into a checkpoint tensor list.
Checkpoint snapshot(const ParameterSet& params, std::string config);

// Loads checkpoint tensors into every parameter whose name starts with
// `prefix` (all parameters when empty). A parameter without a tensor of the
// same name raises kMissingTensor; a shape disagreement raises kCorrupt.
void load_parameters(ParameterSet& params, const Checkpoint& ckpt, const std::string& prefix = {});
// Same, but the parameter "<to_prefix>X" is read from tensor "<from_prefix>X".
void load_parameters_renamed(ParameterSet& params, const Checkpoint& ckpt, const std::string& to_prefix,
                             const std::string& from_prefix);

}  // namespace wnc::nn
