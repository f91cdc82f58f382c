#pragma once

#include "fgdm/error.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fgdm {

enum class NodeKind { routine, type_declaration, loop, branch, statement_group, module_root };
enum class Relation { containment, data_flow, control_flow, call };

inline constexpr std::size_t kNodeKindCount = 6;
inline constexpr std::size_t kRelationCount = 4;

inline constexpr std::array<NodeKind, kNodeKindCount> kAllNodeKinds{
    NodeKind::routine, NodeKind::type_declaration, NodeKind::loop,
    NodeKind::branch,  NodeKind::statement_group,  NodeKind::module_root};
inline constexpr std::array<Relation, kRelationCount> kAllRelations{
    Relation::containment, Relation::data_flow, Relation::control_flow, Relation::call};

/// Wire names: "routine", "type-declaration", "loop", "branch",
/// "statement-group", "module-root".
std::string_view to_string(NodeKind kind);
/// Accepts the wire names, with '_' or ' ' in place of '-' and any case.
std::optional<NodeKind> parse_node_kind(std::string_view name);
/// Unknown kinds from agent output collapse to statement-group.
NodeKind node_kind_or_default(std::string_view name);

/// Wire names: "containment", "data_flow", "control_flow", "call".
std::string_view to_string(Relation relation);
std::optional<Relation> parse_relation(std::string_view name);

struct LineSpan {
  int start = 1;
  int end = 1;

  int length() const { return end - start + 1; }
  bool valid() const { return start >= 1 && start <= end; }
  bool contains(int line) const { return line >= start && line <= end; }
  friend bool operator==(const LineSpan&, const LineSpan&) = default;
};

struct CodeNode {
  std::string id;
  NodeKind kind = NodeKind::statement_group;
  std::string label;
  LineSpan span;
  std::string code;
};

struct FlowEdge {
  std::string src;
  std::string dst;
  Relation relation = Relation::control_flow;

  friend auto operator<=>(const FlowEdge&, const FlowEdge&) = default;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class EmptyGraph : public Error {
 public:
  using Error::Error;
};

/// Immutable program graph. Construction validates the per-node and per-edge
/// invariants and puts nodes into (start_line, id) order and edges into
/// (src, dst, relation) order, so two graphs describing the same structure
/// compare and serialize identically regardless of insertion order.
///
/// The containment-forest property is not enforced here; build_graph checks
/// it and compute_graph_stats reports cycles for graphs from other sources.
class FlowGraph {
 public:
  FlowGraph() = default;
  FlowGraph(std::string file, std::vector<CodeNode> nodes, std::vector<FlowEdge> edges);

  const std::string& file() const { return file_; }
  const std::vector<CodeNode>& nodes() const { return nodes_; }
  const std::vector<FlowEdge>& edges() const { return edges_; }
  bool empty() const { return nodes_.empty(); }

  const CodeNode* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  bool has_edge(const FlowEdge& edge) const;

 private:
  std::string file_;
  std::vector<CodeNode> nodes_;
  std::vector<FlowEdge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Equality over node ids, kinds, labels, spans and the edge set. Node code
/// and the file path are not part of the structure.
bool structurally_equal(const FlowGraph& a, const FlowGraph& b);

/// Node and edge declarations as emitted by the graph-building agent, before
/// any normalization. Kinds and relations are still free-form strings.
struct NodeDecl {
  std::string id;
  std::string kind;
  std::string label;
  int start_line = 0;
  int end_line = 0;
};

struct EdgeDecl {
  std::string src;
  std::string dst;
  std::string relation;
};

struct GraphSpec {
  std::vector<NodeDecl> nodes;
  std::vector<EdgeDecl> edges;
};

struct BuildOptions {
  /// Rename nodes to n0, n1, ... in (start_line, -end_line, original id)
  /// order. Off when rebuilding a graph whose ids are already canonical.
  bool normalize_ids = true;
  /// Code for nodes whose id appears here is taken from the map instead of
  /// the source slice (rewritten blocks of a rectified graph).
  std::map<std::string, std::string> code_overrides;
};

struct BuildResult {
  FlowGraph graph;
  /// original id -> graph id
  std::map<std::string, std::string> id_map;
  std::vector<std::string> warnings;
  int duplicate_edges = 0;
};

/// Turns agent declarations into a valid FlowGraph. Duplicate edges collapse,
/// edges naming undeclared nodes are dropped, and both are reported in
/// warnings. Throws EmptyGraph when no node survives and InvariantViolation
/// when containment edges do not form a forest.
BuildResult build_graph(const GraphSpec& spec, std::string_view source, std::string file,
                        const BuildOptions& options = {});

/// Describes why containment edges are not a forest, or nullopt if they are.
std::optional<std::string> containment_violation(const FlowGraph& g);

/// Longest chain of containment edges; 0 with no containment edges.
/// Cycles are cut at the first revisit.
int containment_depth(const FlowGraph& g);

struct GraphStats {
  int node_count = 0;
  int edge_count = 0;
  std::array<int, kRelationCount> counts_per_relation{};
  std::array<int, kNodeKindCount> counts_per_kind{};
  int max_out_degree = 0;
  int isolated_node_count = 0;
  bool has_containment_cycle = false;

  int relation_count(Relation r) const { return counts_per_relation[static_cast<std::size_t>(r)]; }
  int kind_count(NodeKind k) const { return counts_per_kind[static_cast<std::size_t>(k)]; }
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

GraphStats compute_graph_stats(const FlowGraph& g);

/// Multi-line human-readable rendering used in localization prompts.
std::string describe(const GraphStats& stats);

}  // namespace fgdm
