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

#include "wnc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wnc::nn {
namespace {

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
  put_u8(out, static_cast<std::uint8_t>(v & 0xFF));
  put_u8(out, static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) put_u8(out, static_cast<std::uint8_t>((v >> (8 * k)) & 0xFF));
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::kCorrupt,
                            std::string("corrupt checkpoint: truncated while reading ") + what + " at byte " +
                                std::to_string(pos_));
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint8_t>(bytes_[pos_]) |
                      static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_ + 1]) << 8);
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + k])) << (8 * k);
    pos_ += 4;
    return v;
  }

  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string raw(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u16(out, ckpt.version);
  put_string(out, ckpt.config);
  for (const auto& [name, t] : ckpt.tensors) {
    put_string(out, name);
    put_u8(out, static_cast<std::uint8_t>(t.rank()));
    for (int d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (real v : t.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  const std::string magic = r.raw(sizeof(kCheckpointMagic), "magic");
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw CheckpointError(CheckpointError::Kind::kBadMagic, "not a checkpoint: unknown magic bytes");
  }
  Checkpoint ckpt;
  ckpt.version = r.u16("version");
  if (ckpt.version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::kVersion,
                          "checkpoint version mismatch: file has version " + std::to_string(ckpt.version) +
                              ", this build reads version " + std::to_string(kCheckpointVersion));
  }
  ckpt.config = r.str("config blob");
  while (!r.done()) {
    std::string name = r.str("tensor name");
    const int rank = r.u8("tensor rank");
    Shape shape(rank);
    for (int k = 0; k < rank; ++k) shape[k] = static_cast<int>(r.u32("tensor dims"));
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<real>(std::bit_cast<float>(r.u32("tensor payload")));
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::kIo, "cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::kIo, "failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::kIo, "cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

Checkpoint snapshot(const ParameterSet& params, std::string config) {
  Checkpoint ckpt;
  ckpt.config = std::move(config);
  for (const Parameter& p : params) ckpt.tensors.emplace_back(p.name, p.value);
  return ckpt;
}

void load_parameters(ParameterSet& params, const Checkpoint& ckpt, const std::string& prefix) {
  load_parameters_renamed(params, ckpt, prefix, prefix);
}

void load_parameters_renamed(ParameterSet& params, const Checkpoint& ckpt, const std::string& to_prefix,
                             const std::string& from_prefix) {
  for (Parameter& p : params) {
    if (!p.name.starts_with(to_prefix)) continue;
    const std::string source = from_prefix + p.name.substr(to_prefix.size());
    const Tensor* t = ckpt.find(source);
    if (!t) throw CheckpointError(CheckpointError::Kind::kMissingTensor, "checkpoint lacks tensor " + source);
    if (t->shape() != p.value.shape()) {
      throw CheckpointError(CheckpointError::Kind::kCorrupt, "tensor " + source + " has shape " +
                                                                 shape_string(t->shape()) + ", expected " +
                                                                 shape_string(p.value.shape()));
    }
    p.value = *t;
  }
}

}  // namespace wnc::nn
