#include "fgdm/validation.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace fgdm {

namespace {

std::string describe_edge(const FlowEdge& e) {
  return e.src + " -> " + e.dst + " [" + std::string(to_string(e.relation)) + "]";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

constexpr std::array<std::string_view, 3> kCheckNames{
    "structure_preservation", "defect_coverage", "minimal_edge_manipulation"};

}  // namespace

std::string_view to_string(Check check) { return kCheckNames[static_cast<std::size_t>(check)]; }

std::set<FlowEdge> apply_edge_ops(const FlowGraph& original, const std::vector<EdgeOp>& ops) {
  std::set<FlowEdge> edges(original.edges().begin(), original.edges().end());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const EdgeOp& op = ops[i];
    const std::string where = "edge op " + std::to_string(i) + " (" +
                              std::string(to_string(op.op)) + " " + describe_edge(op.edge) + ")";
    switch (op.op) {
      case EdgeOpKind::add:
        if (!edges.insert(op.edge).second) throw InconsistentPlan(where + ": edge already present");
        break;
      case EdgeOpKind::remove:
        if (!edges.erase(op.edge)) throw InconsistentPlan(where + ": edge not present");
        break;
      case EdgeOpKind::retarget:
        if (!op.replacement) throw InconsistentPlan(where + ": retarget without replacement");
        if (!edges.erase(op.edge)) throw InconsistentPlan(where + ": edge not present");
        if (!edges.insert(*op.replacement).second) {
          throw InconsistentPlan(where + ": replacement " + describe_edge(*op.replacement) +
                                 " already present");
        }
        break;
    }
  }
  return edges;
}

ValidationReport evaluate_constraints(const FlowGraph& original, const FlowGraph& repaired,
                                      const RepairPlan& plan, const Diagnosis& diagnosis) {
  ValidationReport report;
  const std::set<std::string> faulty = diagnosis.faulty_node_ids();
  report.defective_vertex_count = static_cast<int>(faulty.size());

  {
    std::vector<std::string> missing;
    for (const CodeNode& n : original.nodes()) {
      if (!repaired.contains(n.id)) missing.push_back(n.id);
    }
    auto& c = report.check(Check::structure_preservation);
    c.passed = missing.empty();
    c.detail = missing.empty() ? "all " + std::to_string(original.nodes().size()) +
                                     " original vertices retained"
                               : "missing original vertices: " + join(missing);
  }

  {
    std::set<std::string> addressed;
    for (const auto& [id, _] : plan.node_rewrites) addressed.insert(id);
    for (const EdgeOp& op : plan.edge_ops) {
      addressed.insert(op.edge.src);
      addressed.insert(op.edge.dst);
      if (op.replacement) {
        addressed.insert(op.replacement->src);
        addressed.insert(op.replacement->dst);
      }
    }
    std::vector<std::string> unaddressed;
    for (const std::string& id : faulty) {
      if (!addressed.count(id)) unaddressed.push_back(id);
    }
    auto& c = report.check(Check::defect_coverage);
    c.passed = unaddressed.empty();
    c.detail = unaddressed.empty() ? "all " + std::to_string(faulty.size()) +
                                         " defective vertices addressed"
                                   : "defective vertices not addressed: " + join(unaddressed);
  }

  {
    const std::set<FlowEdge> before(original.edges().begin(), original.edges().end());
    const std::set<FlowEdge> after(repaired.edges().begin(), repaired.edges().end());
    std::set<FlowEdge> removed, added;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::inserter(removed, removed.end()));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::inserter(added, added.end()));
    int count = static_cast<int>(removed.size() + added.size());
    // A declared retarget whose removal and addition both survive costs one.
    for (const EdgeOp& op : plan.edge_ops) {
      if (op.op != EdgeOpKind::retarget || !op.replacement) continue;
      if (removed.count(op.edge) && added.count(*op.replacement)) {
        removed.erase(op.edge);
        added.erase(*op.replacement);
        --count;
      }
    }
    report.modified_edge_count = count;
    auto& c = report.check(Check::minimal_edge_manipulation);
    c.passed = count <= report.defective_vertex_count;
    std::ostringstream detail;
    detail << count << " modified edges " << (c.passed ? "<=" : ">") << " "
           << report.defective_vertex_count << " defective vertices";
    c.detail = detail.str();
  }

  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const CheckResult& c) { return c.passed; });
  return report;
}

ValidationReport validate_repair(const FlowGraph& original, const FlowGraph& repaired,
                                 const RepairPlan& plan, const Diagnosis& diagnosis) {
  const std::set<FlowEdge> applied = apply_edge_ops(original, plan.edge_ops);
  const std::set<FlowEdge> actual(repaired.edges().begin(), repaired.edges().end());
  if (applied != actual) {
    std::vector<std::string> diff;
    for (const FlowEdge& e : applied) {
      if (!actual.count(e)) diff.push_back("expected " + describe_edge(e));
    }
    for (const FlowEdge& e : actual) {
      if (!applied.count(e)) diff.push_back("unexplained " + describe_edge(e));
    }
    throw InconsistentPlan("edge ops do not reproduce the repaired graph: " + join(diff));
  }
  return evaluate_constraints(original, repaired, plan, diagnosis);
}

std::vector<std::string> violations(const ValidationReport& report) {
  std::vector<std::string> out;
  if (report.plan_error) out.push_back("plan: " + *report.plan_error);
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    if (!report.checks[i].passed) {
      out.push_back(std::string(kCheckNames[i]) + ": " + report.checks[i].detail);
    }
  }
  return out;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json checks = nlohmann::json::object();
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    checks[std::string(kCheckNames[i])] = {{"passed", report.checks[i].passed},
                                           {"detail", report.checks[i].detail}};
  }
  nlohmann::json j{{"passed", report.passed},
                   {"checks", checks},
                   {"modified_edge_count", report.modified_edge_count},
                   {"defective_vertex_count", report.defective_vertex_count}};
  if (report.plan_error) j["plan_error"] = *report.plan_error;
  return j;
}

}  // namespace fgdm
