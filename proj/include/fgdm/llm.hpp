#pragma once

#include "fgdm/error.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace fgdm::llm {

enum class BackendKind { live, scripted };

std::string_view to_string(BackendKind kind);

struct CompletionRequest {
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  /// "<agent>/<strategy>/<stage>@<file>"; part of the fixture digest.
  std::string tag;
};

struct CompletionResponse {
  /// Provider text, verbatim.
  std::string text;
  long latency_ms = 0;
  BackendKind backend = BackendKind::scripted;
  int attempts = 1;
};

/// SHA-256 over tag, system text and user text (NUL separated), hex encoded.
std::string request_digest(const CompletionRequest& req);

class FixtureMiss : public Error {
 public:
  FixtureMiss(std::string digest, std::string tag)
      : Error("no fixture for digest " + digest + " (tag " + tag + ")"),
        digest_(std::move(digest)),
        tag_(std::move(tag)) {}
  const std::string& digest() const { return digest_; }
  const std::string& tag() const { return tag_; }

 private:
  std::string digest_;
  std::string tag_;
};

class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

class NoPayloadFound : public Error {
 public:
  using Error::Error;
};

class SchemaViolation : public Error {
 public:
  explicit SchemaViolation(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Fixture {
  std::string tag;
  std::string response;

  friend bool operator==(const Fixture&, const Fixture&) = default;
};

/// Recorded responses keyed by request digest. Lookups are exact-match.
class FixtureStore {
 public:
  void add(const CompletionRequest& req, std::string response);
  const Fixture* find(std::string_view digest) const;
  std::size_t size() const { return fixtures_.size(); }
  const std::map<std::string, Fixture, std::less<>>& fixtures() const { return fixtures_; }

  nlohmann::json to_json() const;
  static FixtureStore from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static FixtureStore load(const std::filesystem::path& path);
  /// Builds a store from a run transcript (one JSON object per line).
  static FixtureStore from_transcript(const std::filesystem::path& path);

 private:
  std::map<std::string, Fixture, std::less<>> fixtures_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResponse complete(const CompletionRequest& req) = 0;
};

/// Replays a FixtureStore. Never falls back to the network.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  std::shared_ptr<const FixtureStore> store_;
};

struct LiveConfig {
  /// Full chat-completions endpoint, e.g. https://host/v1/chat/completions.
  std::string url;
  std::string model;
  std::string api_key;
  /// Retries after the first attempt for connection errors, 429 and 5xx.
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
  std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completions client.
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config);
  CompletionResponse complete(const CompletionRequest& req) override;

 private:
  LiveConfig config_;
  std::string origin_;
  std::string path_;
};

/// Writes {tag, digest, request, response, latency_ms} lines to a fresh JSONL file.
class Transcript {
 public:
  explicit Transcript(const std::filesystem::path& path);
  void append(const CompletionRequest& req, const std::string& digest,
              const CompletionResponse& resp);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

/// Shared entry point for all agents. Bounds in-flight calls and records
/// every exchange in the transcript, if one is attached.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, int in_flight_limit = 4,
                   std::shared_ptr<Transcript> transcript = nullptr);

  /// Throws fgdm::Error when user_text is empty, plus whatever the backend throws.
  CompletionResponse complete(const CompletionRequest& req);

 private:
  std::shared_ptr<Backend> backend_;
  std::counting_semaphore<> slots_;
  std::shared_ptr<Transcript> transcript_;
};

/// Finds the first JSON object in text (fenced or bare) that conforms to
/// schema. Objects that parse but do not conform are skipped whole.
/// Throws NoPayloadFound when text holds no well-formed object, and
/// SchemaViolation with the first object's violations otherwise.
nlohmann::json extract_structured(std::string_view text, const nlohmann::json& schema);

}  // namespace fgdm::llm
