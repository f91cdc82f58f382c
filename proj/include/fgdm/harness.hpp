#pragma once

#include "fgdm/agents.hpp"
#include "fgdm/llm.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fgdm {

struct CorpusEntry {
  std::filesystem::path buggy_path;
  std::optional<std::filesystem::path> truth_path;
  std::string project;
  Dialect dialect = Dialect::indentation;
  /// buggy_path relative to the corpus root, '/' separated.
  std::string relpath;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

/// Every <name>.buggy.<ext> under dir (recursively, .py/.c/.h only), paired
/// with a <name>.fixed.<ext> sibling when one exists. The project is the
/// first path segment. Ordered by relpath.
std::vector<CorpusEntry> discover_corpus(const std::filesystem::path& dir);

struct RunConfig {
  std::filesystem::path corpus_dir;
  std::vector<Strategy> strategies{Strategy::standard, Strategy::cot, Strategy::tot};
  llm::BackendKind backend = llm::BackendKind::scripted;
  std::optional<std::filesystem::path> fixtures_path;
  /// Read-only seed for retrieval. The updated store is written to
  /// <out_dir>/knowledge_store.json.
  std::optional<std::filesystem::path> knowledge_store_path;
  std::filesystem::path out_dir;
  int concurrency = 1;
  int retrieval_k = 3;
  int in_flight_limit = 4;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  llm::LiveConfig live;
  /// Replaces embedded prompts/ and schemas/ files of the same name.
  std::optional<std::filesystem::path> resource_dir;

  /// Throws fgdm::Error describing the first invalid setting.
  void validate() const;
};

/// Applies "key = value" settings (keys as in the CLI, e.g. "retrieval_k",
/// "live.url") on top of cfg. Unknown keys throw fgdm::Error.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& settings);

struct StrategyResult {
  Strategy strategy = Strategy::standard;
  std::vector<PipelineRecord> records;
};

struct RunResult {
  std::vector<StrategyResult> results;
  /// "<strategy> <file>: <error>" per failed record.
  std::vector<std::string> failures;
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Runs every strategy over every corpus entry and writes, under out_dir:
/// <strategy>/G1..G4, <strategy>/results/output.json, summary.csv,
/// report.txt, transcript.jsonl and knowledge_store.json. A backend passed
/// in replaces the one the config names.
RunResult run_corpus(const RunConfig& cfg, std::shared_ptr<llm::Backend> backend = nullptr);

nlohmann::json output_json(const StrategyResult& result);
std::string summary_csv(const std::vector<StrategyResult>& results);
/// Per-file LD and cosine columns per strategy with MEAN, MEDIAN and STD DEV
/// (sample) footers, one table per language and baseline.
std::string report_text(const std::vector<StrategyResult>& results);

}  // namespace fgdm
