#include "fgdm/graph.hpp"

#include "fgdm/text.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

namespace fgdm {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kKindNames{
    "routine", "type-declaration", "loop", "branch", "statement-group", "module-root"};
constexpr std::array<std::string_view, kRelationCount> kRelationNames{
    "containment", "data_flow", "control_flow", "call"};

std::string fold_name(std::string_view name, char sep) {
  std::string out;
  for (char c : text::trim(name)) {
    if (c == '-' || c == '_' || c == ' ') {
      out.push_back(sep);
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> parse_node_kind(std::string_view name) {
  const std::string folded = fold_name(name, '-');
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (folded == kKindNames[i]) return kAllNodeKinds[i];
  }
  return std::nullopt;
}

NodeKind node_kind_or_default(std::string_view name) {
  return parse_node_kind(name).value_or(NodeKind::statement_group);
}

std::string_view to_string(Relation relation) {
  return kRelationNames[static_cast<std::size_t>(relation)];
}

std::optional<Relation> parse_relation(std::string_view name) {
  const std::string folded = fold_name(name, '_');
  for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
    if (folded == kRelationNames[i]) return kAllRelations[i];
  }
  return std::nullopt;
}

FlowGraph::FlowGraph(std::string file, std::vector<CodeNode> nodes, std::vector<FlowEdge> edges)
    : file_(std::move(file)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const CodeNode& a, const CodeNode& b) {
    return std::tie(a.span.start, a.id) < std::tie(b.span.start, b.id);
  });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CodeNode& n = nodes_[i];
    if (n.id.empty()) throw InvariantViolation("node with empty id");
    if (!n.span.valid()) {
      throw InvariantViolation("node " + n.id + " has invalid span " + std::to_string(n.span.start) +
                               "-" + std::to_string(n.span.end));
    }
    if (!index_.emplace(n.id, i).second) throw InvariantViolation("duplicate node id " + n.id);
  }
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const FlowEdge& e = edges_[i];
    if (!contains(e.src) || !contains(e.dst)) {
      throw InvariantViolation("edge " + e.src + " -> " + e.dst + " names an unknown node");
    }
    if (e.relation == Relation::containment && e.src == e.dst) {
      throw InvariantViolation("containment self-edge on " + e.src);
    }
    if (i > 0 && edges_[i - 1] == e) {
      throw InvariantViolation("duplicate edge " + e.src + " -> " + e.dst + " [" +
                               std::string(to_string(e.relation)) + "]");
    }
  }
}

const CodeNode* FlowGraph::find(std::string_view id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

bool FlowGraph::has_edge(const FlowEdge& edge) const {
  return std::binary_search(edges_.begin(), edges_.end(), edge);
}

bool structurally_equal(const FlowGraph& a, const FlowGraph& b) {
  if (a.nodes().size() != b.nodes().size() || a.edges() != b.edges()) return false;
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const CodeNode& x = a.nodes()[i];
    const CodeNode& y = b.nodes()[i];
    if (x.id != y.id || x.kind != y.kind || x.label != y.label || x.span != y.span) return false;
  }
  return true;
}

BuildResult build_graph(const GraphSpec& spec, std::string_view source, std::string file,
                        const BuildOptions& options) {
  BuildResult result;
  auto warn = [&](std::string msg) { result.warnings.push_back(std::move(msg)); };

  std::vector<const NodeDecl*> kept;
  std::set<std::string, std::less<>> seen;
  for (const NodeDecl& d : spec.nodes) {
    if (d.id.empty()) {
      warn("dropped node with empty id");
      continue;
    }
    if (!seen.insert(d.id).second) {
      warn("dropped duplicate declaration of node " + d.id);
      continue;
    }
    if (d.start_line < 1 || d.end_line < d.start_line) {
      warn("dropped node " + d.id + " with invalid span " + std::to_string(d.start_line) + "-" +
           std::to_string(d.end_line));
      continue;
    }
    if (!parse_node_kind(d.kind)) {
      warn("node " + d.id + ": unknown kind '" + d.kind + "' mapped to statement-group");
    }
    kept.push_back(&d);
  }
  if (kept.empty()) throw EmptyGraph("no valid node declarations for " + file);

  if (options.normalize_ids) {
    std::sort(kept.begin(), kept.end(), [](const NodeDecl* a, const NodeDecl* b) {
      return std::make_tuple(a->start_line, -a->end_line, std::string_view(a->id)) <
             std::make_tuple(b->start_line, -b->end_line, std::string_view(b->id));
    });
  }

  std::vector<CodeNode> nodes;
  nodes.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const NodeDecl& d = *kept[i];
    std::string id = options.normalize_ids ? "n" + std::to_string(i) : d.id;
    result.id_map.emplace(d.id, id);
    CodeNode node;
    node.kind = node_kind_or_default(d.kind);
    node.label = d.label;
    node.span = {d.start_line, d.end_line};
    if (const auto it = options.code_overrides.find(id); it != options.code_overrides.end()) {
      node.code = it->second;
    } else {
      node.code = text::slice_lines(source, d.start_line, d.end_line);
    }
    node.id = std::move(id);
    nodes.push_back(std::move(node));
  }

  std::set<FlowEdge> edges;
  for (const EdgeDecl& d : spec.edges) {
    const auto relation = parse_relation(d.relation);
    if (!relation) {
      warn("dropped edge " + d.src + " -> " + d.dst + " with unknown relation '" + d.relation + "'");
      continue;
    }
    const auto src = result.id_map.find(d.src);
    const auto dst = result.id_map.find(d.dst);
    if (src == result.id_map.end() || dst == result.id_map.end()) {
      warn("dropped edge " + d.src + " -> " + d.dst + ": undeclared endpoint");
      continue;
    }
    FlowEdge edge{src->second, dst->second, *relation};
    if (edge.relation == Relation::containment && edge.src == edge.dst) {
      warn("dropped containment self-edge on " + d.src);
      continue;
    }
    if (!edges.insert(std::move(edge)).second) {
      ++result.duplicate_edges;
      warn("collapsed duplicate edge " + d.src + " -> " + d.dst + " [" + d.relation + "]");
    }
  }

  result.graph = FlowGraph(std::move(file), std::move(nodes), {edges.begin(), edges.end()});
  if (auto violation = containment_violation(result.graph)) {
    throw InvariantViolation(result.graph.file() + ": " + *violation);
  }
  return result;
}

std::optional<std::string> containment_violation(const FlowGraph& g) {
  std::map<std::string_view, std::string_view> parent;
  for (const FlowEdge& e : g.edges()) {
    if (e.relation != Relation::containment) continue;
    auto [it, inserted] = parent.emplace(e.dst, e.src);
    if (!inserted) {
      return "node " + e.dst + " has two containment parents (" + std::string(it->second) + ", " +
             e.src + ")";
    }
  }
  for (const auto& [child, _] : parent) {
    std::set<std::string_view> path{child};
    for (auto it = parent.find(child); it != parent.end(); it = parent.find(it->second)) {
      if (!path.insert(it->second).second) {
        return "containment cycle through node " + std::string(it->second);
      }
    }
  }
  return std::nullopt;
}

namespace {

std::map<std::string_view, std::vector<std::string_view>> containment_children(const FlowGraph& g) {
  std::map<std::string_view, std::vector<std::string_view>> children;
  for (const FlowEdge& e : g.edges()) {
    if (e.relation == Relation::containment) children[e.src].push_back(e.dst);
  }
  return children;
}

}  // namespace

int containment_depth(const FlowGraph& g) {
  const auto children = containment_children(g);
  std::map<std::string_view, int> memo;
  std::set<std::string_view> on_path;
  // Longest path over the containment relation, skipping back edges.
  std::function<int(std::string_view)> depth = [&](std::string_view id) -> int {
    if (const auto it = memo.find(id); it != memo.end()) return it->second;
    on_path.insert(id);
    int best = 0;
    if (const auto it = children.find(id); it != children.end()) {
      for (std::string_view c : it->second) {
        if (on_path.count(c)) continue;
        best = std::max(best, 1 + depth(c));
      }
    }
    on_path.erase(id);
    memo[id] = best;
    return best;
  };
  int best = 0;
  for (const CodeNode& n : g.nodes()) best = std::max(best, depth(n.id));
  return best;
}

GraphStats compute_graph_stats(const FlowGraph& g) {
  GraphStats s;
  s.node_count = static_cast<int>(g.nodes().size());
  s.edge_count = static_cast<int>(g.edges().size());
  std::map<std::string_view, int> out_degree;
  std::set<std::string_view> touched;
  for (const FlowEdge& e : g.edges()) {
    ++s.counts_per_relation[static_cast<std::size_t>(e.relation)];
    s.max_out_degree = std::max(s.max_out_degree, ++out_degree[e.src]);
    touched.insert(e.src);
    touched.insert(e.dst);
  }
  for (const CodeNode& n : g.nodes()) {
    ++s.counts_per_kind[static_cast<std::size_t>(n.kind)];
    if (!touched.count(n.id)) ++s.isolated_node_count;
  }

  const auto children = containment_children(g);
  std::map<std::string_view, int> color;  // 0 white, 1 grey, 2 black
  std::function<bool(std::string_view)> cyclic = [&](std::string_view id) {
    color[id] = 1;
    if (const auto it = children.find(id); it != children.end()) {
      for (std::string_view c : it->second) {
        if (color[c] == 1) return true;
        if (color[c] == 0 && cyclic(c)) return true;
      }
    }
    color[id] = 2;
    return false;
  };
  for (const CodeNode& n : g.nodes()) {
    if (color[n.id] == 0 && cyclic(n.id)) {
      s.has_containment_cycle = true;
      break;
    }
  }
  return s;
}

std::string describe(const GraphStats& s) {
  std::ostringstream out;
  out << "nodes: " << s.node_count << "\n";
  out << "edges: " << s.edge_count << "\n";
  for (Relation r : kAllRelations) out << "  " << to_string(r) << ": " << s.relation_count(r) << "\n";
  out << "node kinds:\n";
  for (NodeKind k : kAllNodeKinds) out << "  " << to_string(k) << ": " << s.kind_count(k) << "\n";
  out << "max out-degree: " << s.max_out_degree << "\n";
  out << "isolated nodes: " << s.isolated_node_count << "\n";
  out << "containment cycle: " << (s.has_containment_cycle ? "yes" : "no") << "\n";
  return out.str();
}

}  // namespace fgdm
