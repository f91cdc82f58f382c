#include "fgdm/repair.hpp"

#include <array>

namespace fgdm {

namespace {

constexpr std::array<std::string_view, 4> kCategoryNames{
    "broken_dependency", "flow_mismatch", "semantic_inconsistency", "other"};
constexpr std::array<std::string_view, 3> kOpNames{"add", "remove", "retarget"};

}  // namespace

std::string_view to_string(FaultCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

FaultCategory fault_category_or_other(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<FaultCategory>(i);
  }
  return FaultCategory::other;
}

std::string_view to_string(EdgeOpKind kind) { return kOpNames[static_cast<std::size_t>(kind)]; }

std::set<std::string> Diagnosis::faulty_node_ids() const {
  std::set<std::string> ids;
  for (const auto& [id, _] : findings) ids.insert(id);
  return ids;
}

nlohmann::json to_json(const Diagnosis& d) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, f] : d.findings) {
    nodes.push_back({{"id", id}, {"reason", f.reason}, {"category", to_string(f.category)}});
  }
  return {{"faulty_nodes", nodes}};
}

Diagnosis diagnosis_from_json(const nlohmann::json& j) {
  Diagnosis d;
  for (const auto& n : j.at("faulty_nodes")) {
    Finding f;
    f.reason = n.value("reason", "");
    f.category = fault_category_or_other(n.value("category", "other"));
    d.findings.emplace(n.at("id").get<std::string>(), std::move(f));
  }
  return d;
}

nlohmann::json to_json(const FlowEdge& e) {
  return {{"src", e.src}, {"dst", e.dst}, {"relation", to_string(e.relation)}};
}

FlowEdge edge_from_json(const nlohmann::json& j) {
  const std::string rel = j.at("relation").get<std::string>();
  const auto relation = parse_relation(rel);
  if (!relation) throw Error("unknown relation '" + rel + "'");
  return {j.at("src").get<std::string>(), j.at("dst").get<std::string>(), *relation};
}

nlohmann::json to_json(const RepairPlan& p) {
  nlohmann::json ops = nlohmann::json::array();
  for (const EdgeOp& op : p.edge_ops) {
    nlohmann::json o{{"op", to_string(op.op)}, {"edge", to_json(op.edge)}};
    if (op.replacement) o["replacement"] = to_json(*op.replacement);
    ops.push_back(std::move(o));
  }
  nlohmann::json rewrites = nlohmann::json::array();
  for (const auto& [id, r] : p.node_rewrites) {
    rewrites.push_back(
        {{"id", id}, {"faulty_lines", r.faulty_lines}, {"replacement_code", r.replacement_code}});
  }
  return {{"edge_ops", ops}, {"node_rewrites", rewrites}, {"rationale", p.rationale}};
}

RepairPlan plan_from_json(const nlohmann::json& j) {
  RepairPlan p;
  for (const auto& o : j.value("edge_ops", nlohmann::json::array())) {
    EdgeOp op;
    const std::string name = o.at("op").get<std::string>();
    if (name == "add") {
      op.op = EdgeOpKind::add;
    } else if (name == "remove") {
      op.op = EdgeOpKind::remove;
    } else if (name == "retarget") {
      op.op = EdgeOpKind::retarget;
    } else {
      throw Error("unknown edge op '" + name + "'");
    }
    op.edge = edge_from_json(o.at("edge"));
    if (o.contains("replacement") && !o["replacement"].is_null()) {
      op.replacement = edge_from_json(o["replacement"]);
    }
    p.edge_ops.push_back(std::move(op));
  }
  for (const auto& r : j.value("node_rewrites", nlohmann::json::array())) {
    NodeRewrite rw;
    rw.faulty_lines = r.value("faulty_lines", std::vector<int>{});
    rw.replacement_code = r.value("replacement_code", "");
    p.node_rewrites[r.at("id").get<std::string>()] = std::move(rw);
  }
  p.rationale = j.value("rationale", "");
  return p;
}

}  // namespace fgdm
