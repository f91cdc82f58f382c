#include "fgdm/llm.hpp"

#include "fgdm/json_schema.hpp"
#include "fgdm/text.hpp"

#include <httplib.h>

#include <cmath>
#include <thread>

namespace fgdm::llm {

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::live ? "live" : "scripted";
}

std::string request_digest(const CompletionRequest& req) {
  std::string material;
  material.reserve(req.tag.size() + req.system_text.size() + req.user_text.size() + 2);
  material += req.tag;
  material += '\0';
  material += req.system_text;
  material += '\0';
  material += req.user_text;
  return text::sha256_hex(material);
}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "payload does not match schema:";
  for (const std::string& s : v) out += "\n  " + s;
  return out;
}

}  // namespace

SchemaViolation::SchemaViolation(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

void FixtureStore::add(const CompletionRequest& req, std::string response) {
  fixtures_[request_digest(req)] = Fixture{req.tag, std::move(response)};
}

const Fixture* FixtureStore::find(std::string_view digest) const {
  auto it = fixtures_.find(digest);
  return it == fixtures_.end() ? nullptr : &it->second;
}

nlohmann::json FixtureStore::to_json() const {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [digest, f] : fixtures_) entries[digest] = {{"tag", f.tag}, {"response", f.response}};
  return {{"version", 1}, {"fixtures", entries}};
}

FixtureStore FixtureStore::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1) throw Error("unsupported fixture store version");
  FixtureStore store;
  for (const auto& [digest, f] : j.at("fixtures").items()) {
    store.fixtures_[digest] = Fixture{f.value("tag", ""), f.at("response").get<std::string>()};
  }
  return store;
}

void FixtureStore::save(const std::filesystem::path& path) const {
  text::write_file(path, to_json().dump(1) + "\n");
}

FixtureStore FixtureStore::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot read fixtures from " + path.string() + ": " + e.what());
  }
}

FixtureStore FixtureStore::from_transcript(const std::filesystem::path& path) {
  FixtureStore store;
  const std::string contents = text::read_file(path);
  for (std::string_view line : text::split_lines(contents)) {
    if (text::is_blank(line)) continue;
    const auto j = nlohmann::json::parse(line);
    store.fixtures_[j.at("digest").get<std::string>()] =
        Fixture{j.at("tag").get<std::string>(), j.at("response").at("text").get<std::string>()};
  }
  return store;
}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& req) {
  const std::string digest = request_digest(req);
  const Fixture* f = store_->find(digest);
  if (!f) throw FixtureMiss(digest, req.tag);
  return CompletionResponse{f->response, 0, BackendKind::scripted, 1};
}

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {
  const auto scheme = config_.url.find("://");
  if (scheme == std::string::npos) throw Error("endpoint URL needs a scheme: " + config_.url);
  const auto slash = config_.url.find('/', scheme + 3);
  origin_ = config_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
}

CompletionResponse LiveBackend::complete(const CompletionRequest& req) {
  const nlohmann::json body{
      {"model", config_.model},
      {"messages", {{{"role", "system"}, {"content", req.system_text}},
                    {{"role", "user"}, {"content", req.user_text}}}},
      {"temperature", req.temperature},
      {"max_tokens", req.max_output_tokens}};
  const std::string payload = body.dump();

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_problem;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double scale = std::pow(config_.backoff_factor, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(
          config_.initial_backoff * scale));
    }
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_problem = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_problem = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderUnavailable("provider rejected request (HTTP " + std::to_string(res->status) +
                                ")");
    }
    std::string content;
    try {
      const auto j = nlohmann::json::parse(res->body);
      content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderUnavailable(std::string("malformed provider response: ") + e.what());
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    return CompletionResponse{
        std::move(content),
        static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()),
        BackendKind::live, attempt + 1};
  }
  throw ProviderUnavailable("provider unavailable after " + std::to_string(config_.max_retries + 1) +
                            " attempts: " + last_problem);
}

Transcript::Transcript(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot open transcript " + path.string());
}

void Transcript::append(const CompletionRequest& req, const std::string& digest,
                        const CompletionResponse& resp) {
  const nlohmann::json line{
      {"tag", req.tag},
      {"digest", digest},
      {"request",
       {{"system_text", req.system_text},
        {"user_text", req.user_text},
        {"temperature", req.temperature},
        {"max_output_tokens", req.max_output_tokens}}},
      {"response",
       {{"text", resp.text}, {"backend", to_string(resp.backend)}, {"attempts", resp.attempts}}},
      {"latency_ms", resp.latency_ms}};
  const std::string s = line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  std::lock_guard lock(mutex_);
  out_ << s;
  out_.flush();
}

Gateway::Gateway(std::shared_ptr<Backend> backend, int in_flight_limit,
                 std::shared_ptr<Transcript> transcript)
    : backend_(std::move(backend)),
      slots_(std::max(1, in_flight_limit)),
      transcript_(std::move(transcript)) {}

CompletionResponse Gateway::complete(const CompletionRequest& req) {
  if (req.user_text.empty()) throw Error("completion request " + req.tag + " has no user text");
  slots_.acquire();
  CompletionResponse resp;
  try {
    resp = backend_->complete(req);
  } catch (...) {
    slots_.release();
    throw;
  }
  slots_.release();
  if (transcript_) transcript_->append(req, request_digest(req), resp);
  return resp;
}

namespace {

/// Index one past the brace closing the object opened at text[open], or npos.
std::size_t match_object(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

nlohmann::json extract_structured(std::string_view text, const nlohmann::json& schema) {
  std::optional<std::vector<std::string>> first_violations;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    const std::size_t end = match_object(text, pos);
    if (end == std::string_view::npos) {
      ++pos;
      continue;
    }
    nlohmann::json candidate =
        nlohmann::json::parse(text.substr(pos, end - pos), nullptr, /*allow_exceptions=*/false);
    if (candidate.is_discarded() || !candidate.is_object()) {
      ++pos;
      continue;
    }
    auto problems = schema_violations(schema, candidate);
    if (problems.empty()) return candidate;
    if (!first_violations) first_violations = std::move(problems);
    pos = end;
  }
  if (!first_violations) throw NoPayloadFound("response contains no JSON object");
  throw SchemaViolation(std::move(*first_violations));
}

}  // namespace fgdm::llm
