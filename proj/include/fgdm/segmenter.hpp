#pragma once

#include "fgdm/graph.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fgdm {

enum class Dialect { indentation, brace };

std::string_view to_string(Dialect dialect);

/// .py -> indentation; .c and .h -> brace; anything else -> nullopt.
std::optional<Dialect> dialect_for(const std::filesystem::path& path);

struct BlockCandidate {
  LineSpan span;
  NodeKind kind_hint = NodeKind::statement_group;
  int nesting_depth = 0;

  friend bool operator==(const BlockCandidate&, const BlockCandidate&) = default;
};

struct UnbalancedDelimiters {
  int line = 0;
  std::string detail;
};

struct Segmentation {
  /// Ordered by (start_line, nesting_depth).
  std::vector<BlockCandidate> candidates;
  /// Lines holding code, i.e. neither blank nor comment-only. Ascending.
  std::vector<int> code_lines;
  int line_count = 0;
  /// Set when brace matching failed; candidates are then best effort.
  std::optional<UnbalancedDelimiters> unbalanced;
};

/// Splits a source file into candidate code blocks without building an AST.
/// Depth-0 candidates are disjoint and cover every code line: compound
/// constructs become their own blocks and the statements between them are
/// grouped. Nested candidates are the loops, branches, routines and types
/// inside those blocks. Throws fgdm::Error on empty source.
Segmentation segment(std::string_view source, Dialect dialect);

struct CoverageReport {
  /// Code lines that no graph node claims, merged into ranges.
  std::vector<LineSpan> uncovered;
  /// Nodes whose span reaches past the last line of the file.
  std::vector<std::pair<std::string, LineSpan>> out_of_bounds;

  bool empty() const { return uncovered.empty() && out_of_bounds.empty(); }
};

CoverageReport coverage_check(const Segmentation& segmentation, const FlowGraph& graph);

/// Candidate list rendered for grounding the graph-building prompt.
std::string describe(const Segmentation& segmentation);

}  // namespace fgdm
