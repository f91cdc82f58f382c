#include "fgdm/graph.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace fgdm;

namespace {

GraphSpec spec(std::vector<NodeDecl> nodes, std::vector<EdgeDecl> edges) { return {std::move(nodes), std::move(edges)}; }

const char* kSource = "def f(x):\n    y = x\n    return y\n\nprint(f(1))\n";

}  // namespace

TEST_CASE("kind and relation names") {
  for (NodeKind k : kAllNodeKinds) CHECK(parse_node_kind(to_string(k)) == k);
  for (Relation r : kAllRelations) CHECK(parse_relation(to_string(r)) == r);
  CHECK(parse_node_kind("Type_Declaration") == NodeKind::type_declaration);
  CHECK(node_kind_or_default("lambda") == NodeKind::statement_group);
  CHECK_FALSE(parse_relation("calls"));
}

TEST_CASE("FlowGraph rejects invariant violations") {
  CHECK_THROWS_AS(FlowGraph("f", {{"", NodeKind::loop, "", {1, 1}, ""}}, {}), InvariantViolation);
  CHECK_THROWS_AS(FlowGraph("f", {{"a", NodeKind::loop, "", {3, 2}, ""}}, {}), InvariantViolation);
  CHECK_THROWS_AS(FlowGraph("f", {{"a", NodeKind::loop, "", {1, 1}, ""}, {"a", NodeKind::loop, "", {2, 2}, ""}}, {}),
                  InvariantViolation);
  CHECK_THROWS_AS(FlowGraph("f", {{"a", NodeKind::loop, "", {1, 1}, ""}}, {{"a", "b", Relation::call}}),
                  InvariantViolation);
  CHECK_THROWS_AS(FlowGraph("f", {{"a", NodeKind::loop, "", {1, 1}, ""}}, {{"a", "a", Relation::containment}}),
                  InvariantViolation);
  CHECK_NOTHROW(FlowGraph("f", {{"a", NodeKind::loop, "", {1, 1}, ""}}, {{"a", "a", Relation::control_flow}}));
}

TEST_CASE("build_graph normalizes ids and slices code") {
  const auto r = build_graph(spec({{"print", "statement-group", "call", 5, 5},
                                   {"fn", "routine", "f", 1, 3},
                                   {"ret", "statement_group", "body", 2, 3}},
                                  {{"fn", "ret", "containment"}, {"print", "fn", "call"}}),
                             kSource, "a.py");
  REQUIRE(r.graph.nodes().size() == 3);
  CHECK(r.id_map.at("fn") == "n0");
  CHECK(r.id_map.at("ret") == "n1");
  CHECK(r.id_map.at("print") == "n2");
  CHECK(r.graph.find("n1")->code == "    y = x\n    return y");
  CHECK(r.graph.has_edge({"n2", "n0", Relation::call}));
  CHECK(r.warnings.empty());
}

TEST_CASE("build_graph collapses duplicates and drops dangling edges with warnings") {
  const auto r = build_graph(spec({{"a", "routine", "", 1, 3}, {"b", "banana", "", 2, 2}},
                                  {{"a", "b", "data_flow"}, {"a", "b", "data_flow"}, {"a", "zz", "call"},
                                   {"a", "b", "teleport"}}),
                             kSource, "a.py");
  CHECK(r.graph.edges().size() == 1);
  CHECK(r.duplicate_edges == 1);
  CHECK(r.graph.find("n1")->kind == NodeKind::statement_group);
  CHECK(r.warnings.size() >= 3);
}

TEST_CASE("build_graph errors") {
  CHECK_THROWS_AS(build_graph(spec({{"a", "routine", "", 0, 3}}, {}), kSource, "a.py"), EmptyGraph);
  CHECK_THROWS_AS(build_graph(spec({{"a", "routine", "", 1, 3}, {"b", "loop", "", 2, 2}},
                                   {{"a", "b", "containment"}, {"b", "a", "containment"}}),
                              kSource, "a.py"),
                  InvariantViolation);
  CHECK_THROWS_AS(build_graph(spec({{"a", "routine", "", 1, 3}, {"b", "loop", "", 2, 2}, {"c", "loop", "", 2, 2}},
                                   {{"a", "c", "containment"}, {"b", "c", "containment"}}),
                              kSource, "a.py"),
                  InvariantViolation);
}

TEST_CASE("build_graph keeps ids and applies code overrides on request") {
  BuildOptions opt;
  opt.normalize_ids = false;
  opt.code_overrides["n7"] = "patched";
  const auto r = build_graph(spec({{"n7", "routine", "", 1, 3}}, {}), kSource, "a.py", opt);
  CHECK(r.graph.find("n7")->code == "patched");
}

TEST_CASE("graph stats agree with a recount") {
  gen::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const FlowGraph g = gen::graph(rng, 9);
    const GraphStats s = compute_graph_stats(g);
    CHECK(s.node_count == static_cast<int>(g.nodes().size()));
    CHECK(s.edge_count == static_cast<int>(g.edges().size()));
    int isolated = 0, max_out = 0;
    for (const auto& n : g.nodes()) {
      int out = 0, any = 0;
      for (const auto& e : g.edges()) {
        if (e.src == n.id) ++out;
        if (e.src == n.id || e.dst == n.id) ++any;
      }
      max_out = std::max(max_out, out);
      if (any == 0) ++isolated;
    }
    CHECK(s.max_out_degree == max_out);
    CHECK(s.isolated_node_count == isolated);
    int kinds = 0, rels = 0;
    for (int c : s.counts_per_kind) kinds += c;
    for (int c : s.counts_per_relation) rels += c;
    CHECK(kinds == s.node_count);
    CHECK(rels == s.edge_count);
    CHECK_FALSE(s.has_containment_cycle);
    CHECK_FALSE(containment_violation(g));
  }
}

TEST_CASE("containment depth and cycle reporting") {
  const FlowGraph chain("f",
                        {{"a", NodeKind::routine, "", {1, 9}, ""}, {"b", NodeKind::loop, "", {2, 8}, ""},
                         {"c", NodeKind::branch, "", {3, 4}, ""}},
                        {{"a", "b", Relation::containment}, {"b", "c", Relation::containment}});
  CHECK(containment_depth(chain) == 2);
  const FlowGraph cyc("f", {{"a", NodeKind::routine, "", {1, 9}, ""}, {"b", NodeKind::loop, "", {2, 8}, ""}},
                      {{"a", "b", Relation::containment}, {"b", "a", Relation::containment}});
  CHECK(compute_graph_stats(cyc).has_containment_cycle);
  CHECK(containment_violation(cyc));
}
