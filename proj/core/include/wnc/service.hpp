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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnc/editor.hpp"

namespace wnc::service {

// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct Response {
  int status = 200;
  nlohmann::json body;
  std::string session_id;  // echoed in the X-Session-Id header
};

struct LogEntry {
  std::int64_t timestamp_ms = 0;
  std::string endpoint;
  nlohmann::json input;  // request body as received (text, category, control, merge)
  int status = 200;
};

// One client's request history. Entries are only ever appended.
class Session {
 public:
  explicit Session(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  void append(LogEntry e);
  std::vector<LogEntry> entries() const;

 private:
  std::string id_;
  mutable std::mutex mu_;
  std::vector<LogEntry> log_;
};

// Endpoint logic independent of the HTTP transport. The model is never
// mutated after construction, so handlers may run concurrently.
class NeutralizerService {
 public:
  NeutralizerService(std::unique_ptr<edit::Seq2Seq> model, std::string model_hash, int beam = 4,
                     int max_extra_len = 10);

  // Beam width and length limit come from the checkpoint's RunConfig
  // unless `beam` is positive.
  static std::unique_ptr<NeutralizerService> from_file(const std::filesystem::path& ckpt_path, int beam = 0);

  Response health() const;
  Response model_info() const;
  Response detect(const std::string& body, const std::string& session_id = {});
  Response neutralize(const std::string& body, const std::string& session_id = {});

  // Routes by method and path; unknown routes give 404.
  Response handle(const std::string& method, const std::string& path, const std::string& body,
                  const std::string& session_id = {});

  const std::string& model_hash() const { return hash_; }
  const edit::Seq2Seq& model() const { return *model_; }

  // Returns the session with this id, creating a fresh one when the id is
  // empty or unknown.
  std::shared_ptr<Session> session(const std::string& id);
  std::shared_ptr<Session> find_session(const std::string& id) const;

 private:
  std::unique_ptr<edit::Seq2Seq> model_;
  std::string hash_;
  int beam_;
  int max_extra_len_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_session_{1};
  std::uint64_t session_salt_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

// HTTP front end over a NeutralizerService.
class HttpServer {
 public:
  HttpServer(NeutralizerService& svc, ServeOptions opts);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket and returns the port (port 0 picks a free one).
  // Throws std::runtime_error on bind failure.
  int bind();
  // Serves until stop(); binds first when bind() was not called.
  void listen();
  // Blocks until a concurrent listen() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks until the server stops. Throws std::runtime_error on bind failure.
void serve(NeutralizerService& svc, const ServeOptions& opts);

// Environment variable naming the default checkpoint.
inline constexpr const char* kModelEnv = "NEUTRALIZE_MODEL";

}  // namespace wnc::service
