#pragma once

#include "fgdm/repair.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fgdm {

enum class Check { structure_preservation, defect_coverage, minimal_edge_manipulation };

std::string_view to_string(Check check);

struct CheckResult {
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  std::array<CheckResult, 3> checks{};
  int modified_edge_count = 0;
  int defective_vertex_count = 0;
  /// Set when the plan could not be checked as given (edge ops that do not
  /// reproduce the repaired graph, or a repaired graph that failed to build).
  /// Such a report never passes.
  std::optional<std::string> plan_error;

  CheckResult& check(Check c) { return checks[static_cast<std::size_t>(c)]; }
  const CheckResult& check(Check c) const { return checks[static_cast<std::size_t>(c)]; }
};

/// The plan's edge ops do not turn the original edge set into the repaired one.
class InconsistentPlan : public Error {
 public:
  using Error::Error;
};

/// Edge set after applying ops in order. Adding a present edge, removing an
/// absent one, or a retarget without replacement throws InconsistentPlan.
std::set<FlowEdge> apply_edge_ops(const FlowGraph& original, const std::vector<EdgeOp>& ops);

/// The three repair constraints, without checking that the ops explain the
/// repaired graph:
///  - structure preservation: every original node id survives;
///  - defect coverage: every faulty node is rewritten or touched by an edge op;
///  - minimal edge manipulation: |original edges xor repaired edges|, with a
///    declared retarget counted once, is at most the number of faulty nodes.
ValidationReport evaluate_constraints(const FlowGraph& original, const FlowGraph& repaired,
                                      const RepairPlan& plan, const Diagnosis& diagnosis);

/// evaluate_constraints after confirming that applying plan.edge_ops to the
/// original reproduces repaired's edge set exactly (InconsistentPlan if not).
ValidationReport validate_repair(const FlowGraph& original, const FlowGraph& repaired,
                                 const RepairPlan& plan, const Diagnosis& diagnosis);

/// "<check>: <detail>" for every failed check, preceded by the plan error if any.
std::vector<std::string> violations(const ValidationReport& report);

nlohmann::json to_json(const ValidationReport& report);

}  // namespace fgdm
