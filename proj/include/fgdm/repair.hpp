#pragma once

#include "fgdm/graph.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fgdm {

enum class FaultCategory { broken_dependency, flow_mismatch, semantic_inconsistency, other };

std::string_view to_string(FaultCategory category);
/// Unknown names map to FaultCategory::other.
FaultCategory fault_category_or_other(std::string_view name);

struct Finding {
  std::string reason;
  FaultCategory category = FaultCategory::other;
};

/// Faulty nodes of one graph. The finding map's keys are the faulty node ids,
/// so the two can never disagree.
struct Diagnosis {
  std::map<std::string, Finding> findings;

  std::set<std::string> faulty_node_ids() const;
  bool empty() const { return findings.empty(); }
};

enum class EdgeOpKind { add, remove, retarget };

std::string_view to_string(EdgeOpKind kind);

struct EdgeOp {
  EdgeOpKind op = EdgeOpKind::add;
  FlowEdge edge;
  /// Required for retarget: the edge that takes `edge`'s place.
  std::optional<FlowEdge> replacement;
};

struct NodeRewrite {
  std::vector<int> faulty_lines;
  std::string replacement_code;
};

struct RepairPlan {
  std::vector<EdgeOp> edge_ops;
  std::map<std::string, NodeRewrite> node_rewrites;
  FlowGraph rectified_graph;
  std::string rationale;

  bool empty() const { return edge_ops.empty() && node_rewrites.empty(); }
};

// JSON forms shared by the agent payloads, the G2/G3 artifacts and the CLI.
// Diagnosis:  {"faulty_nodes": [{"id", "reason", "category"}]}
// RepairPlan: {"edge_ops": [{"op", "edge": {"src","dst","relation"},
//              "replacement"?}], "node_rewrites": [{"id", "faulty_lines",
//              "replacement_code"}], "rationale"}
// The rectified graph travels separately (as DOT or a graph spec).
nlohmann::json to_json(const Diagnosis& d);
Diagnosis diagnosis_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FlowEdge& e);
FlowEdge edge_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RepairPlan& p);
/// Parses edge ops, rewrites and rationale; the rectified graph is left empty.
RepairPlan plan_from_json(const nlohmann::json& j);

}  // namespace fgdm
