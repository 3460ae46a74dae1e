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

#include "wnc/service.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <variant>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "wnc/checkpoint.hpp"
#include "wnc/systems.hpp"

namespace wnc::service {

using nlohmann::json;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Session::append(LogEntry e) {
  std::lock_guard lock(mu_);
  log_.push_back(std::move(e));
}

std::vector<LogEntry> Session::entries() const {
  std::lock_guard lock(mu_);
  return log_;
}

namespace {

Response error(int status, std::string code, std::string message) {
  return {status, json{{"code", std::move(code)}, {"message", std::move(message)}}, {}};
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct Request {
  text::Sentence sentence;
  std::string category = "unknown";
  std::optional<edit::Control> control;
};

// Parses and validates a detect/neutralize body; returns an error response on failure.
std::variant<Request, Response> parse_request(const std::string& body, bool allow_control) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    return error(400, "invalid_json", "request body is not valid JSON");
  }
  if (!j.is_object()) return error(400, "invalid_body", "request body must be an object");
  if (!j.contains("text") || !j["text"].is_string()) {
    return error(400, "missing_field", "field 'text' (string) is required");
  }
  Request r;
  try {
    r.sentence = text::tokenize(j["text"].get<std::string>());
  } catch (const text::EmptyInputError&) {
    return error(400, "empty_text", "field 'text' contains no tokens");
  }
  if (j.contains("category") && !j["category"].is_null()) {
    if (!j["category"].is_string()) return error(400, "invalid_field", "field 'category' must be a string");
    r.category = j["category"].get<std::string>();
  }
  if (!allow_control) return r;

  edit::Control c;
  if (j.contains("merge") && !j["merge"].is_null()) {
    if (!j["merge"].is_string()) return error(400, "invalid_field", "field 'merge' must be \"replace\" or \"max\"");
    try {
      c.merge = edit::parse_merge_rule(j["merge"].get<std::string>());
    } catch (const std::invalid_argument&) {
      return error(400, "invalid_field", "field 'merge' must be \"replace\" or \"max\"");
    }
  }
  if (j.contains("control") && !j["control"].is_null()) {
    const json& cv = j["control"];
    if (!cv.is_array()) return error(400, "invalid_control", "field 'control' must be an array of numbers");
    for (const auto& v : cv) {
      if (!v.is_number()) return error(400, "invalid_control", "field 'control' must be an array of numbers");
      const double x = v.get<double>();
      if (!(x >= 0.0 && x <= 1.0)) return error(400, "invalid_control", "control values must lie in [0, 1]");
      c.p.push_back(x);
    }
    if (c.p.size() != r.sentence.size()) {
      return error(400, "control_length",
                   "control has " + std::to_string(c.p.size()) + " entries but the text has " +
                       std::to_string(r.sentence.size()) + " tokens");
    }
    r.control = std::move(c);
  }
  return r;
}

std::vector<std::string> surfaces(const text::Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (const auto& t : s.tokens) out.push_back(t.surface);
  return out;
}

const sys::ModularSystem* as_modular(const edit::Seq2Seq& m) { return dynamic_cast<const sys::ModularSystem*>(&m); }

}  // namespace

NeutralizerService::NeutralizerService(std::unique_ptr<edit::Seq2Seq> model, std::string model_hash, int beam,
                                       int max_extra_len)
    : model_(std::move(model)),
      hash_(std::move(model_hash)),
      beam_(beam),
      max_extra_len_(max_extra_len),
      session_salt_(std::random_device{}()) {
  if (!model_) throw std::invalid_argument("service needs a model");
}

std::unique_ptr<NeutralizerService> NeutralizerService::from_file(const std::filesystem::path& ckpt_path, int beam) {
  std::ifstream in(ckpt_path, std::ios::binary);
  if (!in) {
    throw nn::CheckpointError(nn::CheckpointError::Kind::kIo, "cannot open checkpoint " + ckpt_path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  auto model = sys::load_system(nn::parse_checkpoint(bytes));
  const int width = beam > 0 ? beam : model->run_config().beam;
  const int extra = model->run_config().max_extra_len;
  return std::make_unique<NeutralizerService>(std::move(model), fnv1a_hex(bytes), width, extra);
}

std::shared_ptr<Session> NeutralizerService::find_session(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<Session> NeutralizerService::session(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  if (!id.empty()) {
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%08llx-%llu", static_cast<unsigned long long>(session_salt_ & 0xffffffffull),
                static_cast<unsigned long long>(next_session_++));
  auto s = std::make_shared<Session>(buf);
  sessions_.emplace(s->id(), s);
  return s;
}

Response NeutralizerService::health() const { return {200, json{{"status", "ok"}, {"model", hash_}}, {}}; }

Response NeutralizerService::model_info() const {
  const auto& cfg = model_->run_config();
  json j = {{"model", hash_},
            {"kind", model_->kind()},
            {"vocab_size", model_->vocab().size()},
            {"categories", model_->vocab().categories()},
            {"beam", beam_},
            {"max_extra_len", max_extra_len_},
            {"run_config", cfg.to_json()}};
  const auto* m = as_modular(*model_);
  j["has_detector"] = m != nullptr;
  j["supports_control"] = m != nullptr && !m->concat_mode();
  if (m) {
    json names = json::array();
    for (const auto& l : m->lexicons()) names.push_back(l.name);
    j["lexicons"] = names;
  }
  return {200, j, {}};
}

Response NeutralizerService::detect(const std::string& body, const std::string& session_id) {
  auto sess = session(session_id);
  auto parsed = parse_request(body, false);
  Response resp;
  if (auto* err = std::get_if<Response>(&parsed)) {
    resp = *err;
  } else {
    const auto& req = std::get<Request>(parsed);
    const auto* m = as_modular(*model_);
    if (!m) {
      resp = error(400, "no_detector", "the loaded '" + model_->kind() + "' model has no detector");
    } else {
      resp.body = {{"tokens", surfaces(req.sentence)}, {"probabilities", m->detect(req.sentence, req.category)}};
    }
  }
  json input = json::parse(body, nullptr, false);
  sess->append({now_ms(), "/api/detect", input.is_discarded() ? json(body) : input, resp.status});
  resp.session_id = sess->id();
  return resp;
}

Response NeutralizerService::neutralize(const std::string& body, const std::string& session_id) {
  auto sess = session(session_id);
  auto parsed = parse_request(body, true);
  Response resp;
  if (auto* err = std::get_if<Response>(&parsed)) {
    resp = *err;
  } else {
    const auto& req = std::get<Request>(parsed);
    const auto* m = as_modular(*model_);
    if (req.control && (!m || m->concat_mode())) {
      resp = error(400, "control_unsupported", "the loaded model does not accept control vectors");
    } else {
      const auto d = edit::decode(*model_, req.sentence, req.category, beam_, max_extra_len_,
                                  req.control ? &*req.control : nullptr);
      const auto script = text::token_diff(req.sentence.norms(), d.tokens);
      json spans = json::array();
      for (const auto& op : script.ops) {
        if (op.kind != text::EditKind::kEqual) spans.push_back(json::array({op.src_begin, op.src_end}));
      }
      resp.body = {{"tokens", surfaces(req.sentence)},
                   {"probabilities", d.probabilities},
                   {"output_tokens", d.tokens},
                   {"output_text", text::detokenize(d.tokens)},
                   {"changed_spans", spans}};
    }
  }
  json input = json::parse(body, nullptr, false);
  sess->append({now_ms(), "/api/neutralize", input.is_discarded() ? json(body) : input, resp.status});
  resp.session_id = sess->id();
  return resp;
}

Response NeutralizerService::handle(const std::string& method, const std::string& path, const std::string& body,
                                    const std::string& session_id) {
  try {
    if (path == "/api/health") return method == "GET" ? health() : error(405, "method_not_allowed", "use GET");
    if (path == "/api/model-info") {
      return method == "GET" ? model_info() : error(405, "method_not_allowed", "use GET");
    }
    if (path == "/api/detect") {
      return method == "POST" ? detect(body, session_id) : error(405, "method_not_allowed", "use POST");
    }
    if (path == "/api/neutralize") {
      return method == "POST" ? neutralize(body, session_id) : error(405, "method_not_allowed", "use POST");
    }
    return error(404, "not_found", "no endpoint " + path);
  } catch (const std::invalid_argument& e) {
    return error(400, "invalid_request", e.what());
  } catch (const std::exception& e) {
    spdlog::error("request {} {} failed: {}", method, path, e.what());
    return error(500, "internal", "internal error");
  }
}

struct HttpServer::Impl {
  Impl(NeutralizerService& s, ServeOptions o) : svc(s), opts(std::move(o)) {}

  NeutralizerService& svc;
  ServeOptions opts;
  httplib::Server server;
  int port = -1;
};

HttpServer::HttpServer(NeutralizerService& svc, ServeOptions opts)
    : impl_(std::make_unique<Impl>(svc, std::move(opts))) {
  auto& server = impl_->server;
  const std::string origin = impl_->opts.cors_origin;
  auto reply = [&svc](const httplib::Request& req, httplib::Response& res) {
    const Response r = svc.handle(req.method, req.path, req.body, req.get_header_value("X-Session-Id"));
    res.status = r.status;
    if (!r.session_id.empty()) res.set_header("X-Session-Id", r.session_id);
    res.set_content(r.body.dump(), "application/json");
  };
  server.set_pre_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session-Id");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Expose-Headers", "X-Session-Id");
    return httplib::Server::HandlerResponse::Unhandled;
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get(R"(/api/.*)", reply);
  server.Post(R"(/api/.*)", reply);
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      const json body = {{"code", res.status == 404 ? "not_found" : "http_error"},
                         {"message", "request to " + req.path + " failed with status " + std::to_string(res.status)}};
      res.set_content(body.dump(), "application/json");
    }
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content(json{{"code", "internal"}, {"message", "internal error"}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->port >= 0) return impl_->port;
  const auto& o = impl_->opts;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else if (impl_->server.bind_to_port(o.host, o.port)) {
    impl_->port = o.port;
  }
  if (impl_->port < 0) throw std::runtime_error("cannot bind " + o.host + ":" + std::to_string(o.port));
  return impl_->port;
}

void HttpServer::listen() {
  const int port = bind();
  spdlog::info("serving model {} on http://{}:{}", impl_->svc.model_hash(), impl_->opts.host, port);
  if (!impl_->server.listen_after_bind()) throw std::runtime_error("server on port " + std::to_string(port) + " failed");
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void serve(NeutralizerService& svc, const ServeOptions& opts) {
  HttpServer server(svc, opts);
  server.listen();
}

}  // namespace wnc::service
