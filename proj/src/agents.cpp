#include "fgdm/agents.hpp"

#include "fgdm/dot.hpp"
#include "fgdm/text.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace fgdm {

GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec spec;
  for (const auto& n : j.at("nodes")) {
    spec.nodes.push_back({n.at("id").get<std::string>(), n.at("kind").get<std::string>(),
                          n.value("label", ""), n.at("start_line").get<int>(),
                          n.at("end_line").get<int>()});
  }
  for (const auto& e : j.at("edges")) {
    spec.edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                          e.at("relation").get<std::string>()});
  }
  return spec;
}

nlohmann::json to_json(const GraphSpec& spec) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const NodeDecl& n : spec.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", n.kind},
                     {"label", n.label},
                     {"start_line", n.start_line},
                     {"end_line", n.end_line}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const EdgeDecl& e : spec.edges) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"relation", e.relation}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

GraphSpec to_spec(const FlowGraph& g) {
  GraphSpec spec;
  for (const CodeNode& n : g.nodes()) {
    spec.nodes.push_back({n.id, std::string(to_string(n.kind)), n.label, n.span.start, n.span.end});
  }
  for (const FlowEdge& e : g.edges()) {
    spec.edges.push_back({e.src, e.dst, std::string(to_string(e.relation))});
  }
  return spec;
}

std::string strip_fences(std::string_view text) {
  const auto lines = text::split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && text::is_blank(lines[first])) ++first;
  if (first == lines.size() || !text::trim(lines[first]).starts_with("```")) return std::string(text);
  std::size_t last = lines.size();
  while (last > first + 1 && text::is_blank(lines[last - 1])) --last;
  if (last <= first + 1 || text::trim(lines[last - 1]) != "```") return std::string(text);
  std::string out;
  for (std::size_t i = first + 1; i + 1 < last; ++i) {
    out.append(lines[i]);
    out.push_back('\n');
  }
  return out;
}

namespace {

using Vars = std::map<std::string, std::string>;

std::string schema_name(AgentRole role) {
  switch (role) {
    case AgentRole::graph_builder:
      return "graph_spec";
    case AgentRole::fault_localizer:
      return "diagnosis";
    case AgentRole::graph_repair:
      return "repair";
    case AgentRole::reconstruction:
      return "reconstruction";
  }
  return {};
}

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += "- " + s + "\n";
  return out;
}

/// One model call whose answer must match the role's schema. A schema
/// failure is re-asked once with the problems appended; a second failure
/// throws AgentOutputError.
nlohmann::json call_structured(AgentContext& ctx, AgentSession& session, AgentRole role,
                               Strategy strategy, const std::string& stage, const Vars& vars,
                               const std::string& feedback = {}) {
  const PromptTemplate t = ctx.prompts->get(role, strategy);
  const nlohmann::json schema =
      nlohmann::json::parse(ctx.resources->get("schemas/" + schema_name(role) + ".schema.json"));

  llm::CompletionRequest req;
  req.system_text = render(t.system, vars);
  req.user_text = render(t.user, vars) + feedback;
  req.temperature = ctx.temperature;
  req.max_output_tokens = ctx.max_output_tokens;

  std::vector<std::string> problems;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string this_stage = attempt == 0 ? stage : stage + "-reask";
    req.tag = std::string(to_string(role)) + "/" + std::string(to_string(strategy)) + "/" +
              this_stage + "@" + session.file;
    if (attempt == 1) {
      req.user_text += "\n\nYour previous answer could not be used:\n" + bullet_list(problems) +
                       "Reply again with one JSON object of the required form.\n";
    }
    const llm::CompletionResponse resp = ctx.gateway->complete(req);
    session.transcripts.push_back({req.tag, llm::request_digest(req)});
    try {
      return llm::extract_structured(resp.text, schema);
    } catch (const llm::SchemaViolation& e) {
      problems = e.violations();
    } catch (const llm::NoPayloadFound& e) {
      problems = {e.what()};
    }
  }
  throw AgentOutputError(std::string(to_string(role)) + " output unusable after re-ask: " +
                         problems.front());
}

std::string node_code(const FlowGraph& g, const std::set<std::string>* only = nullptr) {
  std::ostringstream out;
  for (const CodeNode& n : g.nodes()) {
    if (only && !only->count(n.id)) continue;
    out << "[" << n.id << "] " << to_string(n.kind) << " \"" << n.label << "\" lines "
        << n.span.start << "-" << n.span.end << "\n"
        << n.code << "\n\n";
  }
  return out.str();
}

std::string format_retrieved(const std::vector<retrieval::Hit>& hits) {
  if (hits.empty()) return "(none)\n";
  std::ostringstream out;
  for (const retrieval::Hit& h : hits) {
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", h.score);
    out << "- [similarity " << score << "] " << h.record.record_id << "\n"
        << "  graph: " << h.record.graph_summary << "\n"
        << "  bug: " << h.record.bug_description << "\n"
        << "  fix: " << h.record.fix_description << "\n";
  }
  return out.str();
}

std::string format_faults(const Diagnosis& d) {
  std::string out;
  for (const auto& [id, f] : d.findings) {
    out += "- " + id + " [" + std::string(to_string(f.category)) + "]: " + f.reason + "\n";
  }
  return out;
}

std::string one_line(const GraphStats& s) {
  std::ostringstream out;
  out << s.node_count << " nodes, " << s.edge_count << " edges (";
  for (std::size_t r = 0; r < kRelationCount; ++r) {
    out << (r ? ", " : "") << to_string(kAllRelations[r]) << " " << s.counts_per_relation[r];
  }
  out << ")";
  return out.str();
}

}  // namespace

Agent1Result agent1_build(std::string_view source, const Segmentation& segments, Strategy strategy,
                          AgentContext& ctx, AgentSession& session) {
  const Vars vars{{"file", session.file},
                  {"language", session.language},
                  {"segments", describe(segments)},
                  {"numbered_source", text::number_lines(source)}};
  Agent1Result result;
  nlohmann::json payload;
  try {
    payload = call_structured(ctx, session, AgentRole::graph_builder, strategy, "initial", vars);
    if (payload.at("nodes").size() < 3) {
      result.retry_count = 1;
      payload = call_structured(ctx, session, AgentRole::graph_builder, Strategy::cot, "retry", vars);
      if (payload.at("nodes").size() < 3) {
        throw Agent1Failed("graph builder declared " + std::to_string(payload.at("nodes").size()) +
                           " nodes after the retry; at least 3 are required");
      }
    }
  } catch (const AgentOutputError& e) {
    throw Agent1Failed(e.what());
  }

  try {
    BuildResult built = build_graph(graph_spec_from_json(payload), source, session.file);
    for (std::string& w : built.warnings) session.warnings.push_back("graph: " + std::move(w));
    result.graph = std::move(built.graph);
  } catch (const EmptyGraph& e) {
    throw Agent1Failed(std::string("no usable graph: ") + e.what());
  } catch (const InvariantViolation& e) {
    throw Agent1Failed(std::string("no usable graph: ") + e.what());
  }

  const CoverageReport coverage = coverage_check(segments, result.graph);
  for (const LineSpan& s : coverage.uncovered) {
    session.warnings.push_back("coverage: lines " + std::to_string(s.start) + "-" +
                               std::to_string(s.end) + " belong to no node");
  }
  for (const auto& [id, s] : coverage.out_of_bounds) {
    session.warnings.push_back("coverage: node " + id + " spans lines " + std::to_string(s.start) +
                               "-" + std::to_string(s.end) + " beyond the end of the file");
  }
  return result;
}

Diagnosis agent2_localize(const FlowGraph& graph, const GraphStats& stats,
                          const std::vector<retrieval::Hit>& retrieved, Strategy strategy,
                          AgentContext& ctx, AgentSession& session) {
  const Vars vars{{"file", session.file},
                  {"language", session.language},
                  {"stats", describe(stats)},
                  {"dot", clean_dot(graph)},
                  {"node_code", node_code(graph)},
                  {"retrieved", format_retrieved(retrieved)}};
  const nlohmann::json payload =
      call_structured(ctx, session, AgentRole::fault_localizer, strategy, "initial", vars);
  Diagnosis raw = diagnosis_from_json(payload);
  Diagnosis d;
  for (auto& [id, finding] : raw.findings) {
    if (graph.contains(id)) {
      d.findings.emplace(id, std::move(finding));
    } else {
      session.warnings.push_back("diagnosis: dropped unknown node id " + id);
    }
  }
  return d;
}

namespace {

struct CandidateRepair {
  RepairPlan plan;
  ValidationReport report;
};

CandidateRepair assess(std::string_view source, const FlowGraph& graph, const Diagnosis& diagnosis,
                       const nlohmann::json& payload, AgentSession& session) {
  CandidateRepair c;
  std::vector<std::string> warnings;
  try {
    c.plan = plan_from_json(payload);
  } catch (const Error& e) {
    c.report = evaluate_constraints(graph, FlowGraph{}, c.plan, diagnosis);
    c.report.plan_error = e.what();
    c.report.passed = false;
    return c;
  }

  for (auto it = c.plan.node_rewrites.begin(); it != c.plan.node_rewrites.end();) {
    const CodeNode* node = graph.find(it->first);
    if (!diagnosis.findings.count(it->first) || !node) {
      warnings.push_back("repair: dropped rewrite of non-faulty node " + it->first);
      it = c.plan.node_rewrites.erase(it);
      continue;
    }
    std::vector<int> kept;
    for (int line : it->second.faulty_lines) {
      if (node->span.contains(line)) {
        kept.push_back(line);
      } else {
        warnings.push_back("repair: dropped faulty line " + std::to_string(line) +
                           " outside node " + it->first);
      }
    }
    it->second.faulty_lines = std::move(kept);
    ++it;
  }

  BuildOptions options;
  options.normalize_ids = false;
  for (const auto& [id, rw] : c.plan.node_rewrites) options.code_overrides[id] = rw.replacement_code;

  try {
    BuildResult built =
        build_graph(graph_spec_from_json(payload.at("rectified_graph")), source, graph.file(), options);
    for (std::string& w : built.warnings) warnings.push_back("rectified graph: " + std::move(w));
    c.plan.rectified_graph = std::move(built.graph);
  } catch (const Error& e) {
    c.report = evaluate_constraints(graph, FlowGraph{}, c.plan, diagnosis);
    c.report.plan_error = std::string("rectified graph unusable: ") + e.what();
    c.report.passed = false;
    session.warnings.insert(session.warnings.end(), warnings.begin(), warnings.end());
    return c;
  }

  try {
    c.report = validate_repair(graph, c.plan.rectified_graph, c.plan, diagnosis);
  } catch (const InconsistentPlan& e) {
    c.report = evaluate_constraints(graph, c.plan.rectified_graph, c.plan, diagnosis);
    c.report.plan_error = e.what();
    c.report.passed = false;
  }
  session.warnings.insert(session.warnings.end(), warnings.begin(), warnings.end());
  return c;
}

}  // namespace

Agent3Result agent3_repair(std::string_view source, const FlowGraph& graph,
                           const Diagnosis& diagnosis,
                           const std::vector<retrieval::Hit>& retrieved, Strategy strategy,
                           AgentContext& ctx, AgentSession& session) {
  const std::set<std::string> faulty = diagnosis.faulty_node_ids();
  const Vars vars{{"file", session.file},
                  {"language", session.language},
                  {"dot", clean_dot(graph)},
                  {"faults", format_faults(diagnosis)},
                  {"node_code", node_code(graph, &faulty)},
                  {"retrieved", format_retrieved(retrieved)}};

  Agent3Result result;
  nlohmann::json payload =
      call_structured(ctx, session, AgentRole::graph_repair, strategy, "initial", vars);
  CandidateRepair c = assess(source, graph, diagnosis, payload, session);
  if (!c.report.passed) {
    result.attempts = 2;
    const std::string feedback = "\n\nYour previous repair failed validation:\n" +
                                 bullet_list(violations(c.report)) +
                                 "Revise the repair so that every constraint holds.\n";
    payload = call_structured(ctx, session, AgentRole::graph_repair, strategy, "revalidate", vars,
                              feedback);
    c = assess(source, graph, diagnosis, payload, session);
    if (!c.report.passed) {
      session.warnings.push_back("repair: validation failed after re-ask; reconstruction proceeds");
    }
  }
  result.plan = std::move(c.plan);
  result.validation = std::move(c.report);
  return result;
}

Reconstruction agent4_reconstruct(std::string_view source, const RepairPlan& plan,
                                  Strategy strategy, AgentContext& ctx, AgentSession& session) {
  if (plan.empty()) return {std::string(source), {}};
  const Vars vars{{"file", session.file},
                  {"language", session.language},
                  {"numbered_source", text::number_lines(source)},
                  {"plan", to_json(plan).dump(2)},
                  {"rectified_dot", clean_dot(plan.rectified_graph)}};
  const nlohmann::json payload =
      call_structured(ctx, session, AgentRole::reconstruction, strategy, "initial", vars);
  Reconstruction r;
  r.fixed_code = strip_fences(payload.at("fixed_code").get<std::string>());
  r.recommendations = payload.at("recommendations").get<std::vector<std::string>>();
  return r;
}

namespace {

std::string language_of(Dialect d) { return d == Dialect::indentation ? "Python" : "C"; }

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  text::write_file(p, j.dump(2) + "\n");
}

}  // namespace

PipelineRecord run_pipeline(const PipelineInput& input, Strategy strategy, AgentContext& ctx,
                            const std::optional<std::filesystem::path>& artifact_root) {
  PipelineRecord rec;
  rec.file = input.file;
  rec.strategy = strategy;
  AgentSession session{input.file, language_of(input.dialect), {}, {}};
  auto artifact = [&](const char* stage, const std::string& suffix) {
    return *artifact_root / stage / (input.file + suffix);
  };

  std::string stage = "agent1";
  try {
    const Segmentation segments = segment(input.source, input.dialect);
    if (segments.unbalanced) {
      session.warnings.push_back("segmenter: " + segments.unbalanced->detail + " at line " +
                                 std::to_string(segments.unbalanced->line));
    }
    Agent1Result a1 = agent1_build(input.source, segments, strategy, ctx, session);
    rec.graph = std::move(a1.graph);
    rec.retry_count_agent1 = a1.retry_count;
    if (artifact_root) write_dot(rec.graph, artifact("G1", ".dot"));

    stage = "agent2";
    const GraphStats stats = compute_graph_stats(rec.graph);
    const retrieval::Embedding embedding = retrieval::embed_graph(rec.graph);
    std::vector<retrieval::Hit> retrieved;
    if (ctx.knowledge && ctx.knowledge->size() > 0) {
      retrieval::QueryResult q = ctx.knowledge->query(embedding, ctx.retrieval_k);
      if (q.warning) session.warnings.push_back("retrieval: " + *q.warning);
      retrieved = std::move(q.hits);
    }
    rec.diagnosis = agent2_localize(rec.graph, stats, retrieved, strategy, ctx, session);
    if (artifact_root) write_json(artifact("G2", ".json"), to_json(rec.diagnosis));

    stage = "agent3";
    if (rec.diagnosis.empty()) {
      rec.repair.rectified_graph = rec.graph;
      rec.validation = evaluate_constraints(rec.graph, rec.graph, rec.repair, rec.diagnosis);
    } else {
      Agent3Result a3 =
          agent3_repair(input.source, rec.graph, rec.diagnosis, retrieved, strategy, ctx, session);
      rec.repair = std::move(a3.plan);
      rec.validation = std::move(a3.validation);
      rec.repair_attempts = a3.attempts;
    }
    if (artifact_root) {
      write_json(artifact("G3", ".json"), {{"plan", to_json(rec.repair)},
                                           {"validation", to_json(rec.validation)},
                                           {"attempts", rec.repair_attempts}});
      write_dot(rec.repair.rectified_graph, artifact("G3", ".dot"));
    }

    stage = "agent4";
    Reconstruction a4 = rec.diagnosis.empty()
                            ? Reconstruction{input.source, {}}
                            : agent4_reconstruct(input.source, rec.repair, strategy, ctx, session);
    rec.fixed_code = std::move(a4.fixed_code);
    rec.recommendations = std::move(a4.recommendations);
    if (artifact_root) text::write_file(artifact("G4", ""), rec.fixed_code);

    stage = "metrics";
    rec.metrics = metrics::measure(input.source, rec.fixed_code, metrics::Baseline::source_vs_fixed);
    if (input.truth) {
      rec.truth_metrics =
          metrics::measure(rec.fixed_code, *input.truth, metrics::Baseline::fixed_vs_truth);
    }

    if (rec.validation.passed && !rec.diagnosis.empty() && ctx.knowledge_sink) {
      retrieval::KnowledgeRecord k;
      k.record_id = std::string(to_string(strategy)) + ":" + input.file;
      k.embedding = embedding;
      k.graph_summary = one_line(stats);
      k.bug_description = format_faults(rec.diagnosis);
      k.fix_description = rec.repair.rationale;
      k.source_file = input.file;
      try {
        ctx.knowledge_sink->insert(std::move(k));
      } catch (const retrieval::DuplicateRecordId& e) {
        session.warnings.push_back(std::string("knowledge: ") + e.what());
      }
    }
  } catch (const std::exception& e) {
    rec.error = stage + ": " + e.what();
  }
  rec.transcripts = std::move(session.transcripts);
  rec.warnings = std::move(session.warnings);
  return rec;
}

nlohmann::json to_json(const PipelineRecord& r) {
  nlohmann::json j{{"file", r.file},
                   {"strategy", to_string(r.strategy)},
                   {"retry_count_agent1", r.retry_count_agent1}};
  if (r.error) {
    j["error"] = *r.error;
  } else {
    nlohmann::json faulty = nlohmann::json::array();
    for (const auto& [id, _] : r.diagnosis.findings) faulty.push_back(id);
    j["graph"] = {{"nodes", r.graph.nodes().size()}, {"edges", r.graph.edges().size()}};
    j["faulty_nodes"] = faulty;
    j["repair_attempts"] = r.repair_attempts;
    j["validation_passed"] = r.validation.passed;
    j["modified_edge_count"] = r.validation.modified_edge_count;
    j["recommendations"] = r.recommendations;
    nlohmann::json m = nlohmann::json::object();
    for (const auto* rec : {&r.metrics, &r.truth_metrics}) {
      if (!*rec) continue;
      m[std::string(metrics::to_string((*rec)->baseline))] = {{"levenshtein", (*rec)->levenshtein},
                                                              {"line_dist", (*rec)->line_dist},
                                                              {"cosine", (*rec)->cosine}};
    }
    j["metrics"] = m;
  }
  j["warnings"] = r.warnings;
  nlohmann::json calls = nlohmann::json::array();
  for (const TranscriptRef& t : r.transcripts) calls.push_back({{"tag", t.tag}, {"digest", t.digest}});
  j["transcripts"] = calls;
  return j;
}

}  // namespace fgdm
