#pragma once

#include "fgdm/graph.hpp"
#include "fgdm/llm.hpp"
#include "fgdm/metrics.hpp"
#include "fgdm/prompts.hpp"
#include "fgdm/repair.hpp"
#include "fgdm/retrieval.hpp"
#include "fgdm/segmenter.hpp"
#include "fgdm/validation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fgdm {

/// Agent 1 produced no usable graph, even after its retry.
class Agent1Failed : public Error {
 public:
  using Error::Error;
};

/// An agent's output stayed unusable after the re-ask.
class AgentOutputError : public Error {
 public:
  using Error::Error;
};

GraphSpec graph_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GraphSpec& spec);
/// Spec form of a built graph (ids, kinds, labels, spans and edges).
GraphSpec to_spec(const FlowGraph& g);

/// Text between the first fence line and the closing fence, or the input
/// unchanged when it is not fenced.
std::string strip_fences(std::string_view text);

/// What every agent needs: the model, its templates and schemas, and the
/// retrieval side.
struct AgentContext {
  llm::Gateway* gateway = nullptr;
  const PromptLibrary* prompts = nullptr;
  const resources::Resources* resources = nullptr;
  /// Queried for retrieval context. Fixed for the duration of a run.
  const retrieval::KnowledgeStore* knowledge = nullptr;
  /// Receives records of validated repairs. May be null.
  retrieval::KnowledgeStore* knowledge_sink = nullptr;
  int retrieval_k = 3;
  double temperature = 0.0;
  int max_output_tokens = 4096;
};

struct TranscriptRef {
  std::string tag;
  std::string digest;
};

/// Per-file state shared by the agent calls of one pipeline run.
struct AgentSession {
  std::string file;
  std::string language;
  std::vector<TranscriptRef> transcripts;
  std::vector<std::string> warnings;
};

struct Agent1Result {
  FlowGraph graph;
  int retry_count = 0;
};

Agent1Result agent1_build(std::string_view source, const Segmentation& segments, Strategy strategy,
                          AgentContext& ctx, AgentSession& session);

Diagnosis agent2_localize(const FlowGraph& graph, const GraphStats& stats,
                          const std::vector<retrieval::Hit>& retrieved, Strategy strategy,
                          AgentContext& ctx, AgentSession& session);

struct Agent3Result {
  RepairPlan plan;
  ValidationReport validation;
  /// 1, or 2 when the first plan failed validation and was re-asked.
  int attempts = 1;
};

Agent3Result agent3_repair(std::string_view source, const FlowGraph& graph,
                           const Diagnosis& diagnosis,
                           const std::vector<retrieval::Hit>& retrieved, Strategy strategy,
                           AgentContext& ctx, AgentSession& session);

struct Reconstruction {
  std::string fixed_code;
  std::vector<std::string> recommendations;
};

/// An empty plan returns the source without a model call.
Reconstruction agent4_reconstruct(std::string_view source, const RepairPlan& plan,
                                  Strategy strategy, AgentContext& ctx, AgentSession& session);

struct PipelineInput {
  /// Corpus-relative path; names the artifacts and the fixture tags.
  std::string file;
  std::string source;
  std::optional<std::string> truth;
  Dialect dialect = Dialect::indentation;
};

struct PipelineRecord {
  std::string file;
  Strategy strategy = Strategy::standard;
  FlowGraph graph;
  Diagnosis diagnosis;
  RepairPlan repair;
  std::string fixed_code;
  std::vector<std::string> recommendations;
  ValidationReport validation;
  /// Source against fixed code.
  std::optional<metrics::MetricsRecord> metrics;
  /// Fixed code against ground truth, when the corpus has one.
  std::optional<metrics::MetricsRecord> truth_metrics;
  std::vector<TranscriptRef> transcripts;
  int retry_count_agent1 = 0;
  int repair_attempts = 0;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
};

/// Agents 1 to 4, validation and metrics for one file. Failures land in
/// record.error. When artifact_root is set, stage outputs are written to
/// <artifact_root>/G1..G4/<file>.
PipelineRecord run_pipeline(const PipelineInput& input, Strategy strategy, AgentContext& ctx,
                            const std::optional<std::filesystem::path>& artifact_root);

/// Record summary used in output.json.
nlohmann::json to_json(const PipelineRecord& record);

}  // namespace fgdm
