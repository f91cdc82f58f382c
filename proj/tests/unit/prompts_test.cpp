#include "fgdm/config.hpp"
#include "fgdm/error.hpp"
#include "fgdm/json_schema.hpp"
#include "fgdm/prompts.hpp"
#include "fgdm/text.hpp"

#include <doctest.h>

#include <regex>

using namespace fgdm;

TEST_CASE("render substitutes and rejects unknown or unterminated placeholders") {
  CHECK(render("a {{x}} b {{y}}{{x}}", {{"x", "1"}, {"y", "{{x}}"}}) == "a 1 b {{x}}1");
  CHECK_THROWS_AS(render("{{missing}}", {}), Error);
  CHECK_THROWS_AS(render("{{open", {{"open", "v"}}), Error);
  CHECK(render("single { brace }", {}) == "single { brace }");
}

TEST_CASE("parse_template splits sections") {
  const auto t = parse_template("=== system ===\nYou are X.\n=== user ===\nDo {{y}}.\n");
  CHECK(text::trim(t.system) == "You are X.");
  CHECK(text::trim(t.user) == "Do {{y}}.");
  CHECK_THROWS(parse_template("no sections"));
}

TEST_CASE("every role and strategy has a template that names its inputs") {
  const PromptLibrary lib;
  const std::map<AgentRole, std::vector<std::string>> inputs{
      {AgentRole::graph_builder, {"file", "language", "segments", "numbered_source"}},
      {AgentRole::fault_localizer, {"file", "language", "stats", "dot", "node_code", "retrieved"}},
      {AgentRole::graph_repair, {"dot", "faults", "node_code", "retrieved"}},
      {AgentRole::reconstruction, {"file", "language", "numbered_source", "plan", "rectified_dot"}}};
  for (const auto& [role, names] : inputs) {
    for (Strategy s : {Strategy::standard, Strategy::cot, Strategy::tot}) {
      const auto t = lib.get(role, s);
      CHECK_FALSE(t.system.empty());
      std::map<std::string, std::string> vars;
      for (const auto& n : names) vars[n] = "<" + n + ">";
      const std::string all = render(t.system, vars) + render(t.user, vars);
      for (const auto& n : names) CHECK(all.find("<" + n + ">") != std::string::npos);
      if (s == Strategy::tot) {
        const std::string lower = [&] {
          std::string x = all;
          for (char& c : x) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          return x;
        }();
        CHECK(lower.find("branch") != std::string::npos);
        CHECK(lower.find("backtrack") != std::string::npos);
      }
    }
  }
  CHECK(parse_strategy("cot") == Strategy::cot);
  CHECK_FALSE(parse_strategy("zero-shot"));
}

TEST_CASE("resource override directory wins") {
  const auto dir = std::filesystem::temp_directory_path() / "fgdm-prompt-override";
  std::filesystem::create_directories(dir / "prompts");
  text::write_file(dir / "prompts/graph_builder_cot.txt", "=== system ===\nS\n=== user ===\nU {{file}}\n");
  const PromptLibrary lib{resources::Resources(dir)};
  CHECK(text::trim(lib.get(AgentRole::graph_builder, Strategy::cot).user) == "U {{file}}");
  CHECK(lib.get(AgentRole::graph_builder, Strategy::tot).system.size() > 10);
  CHECK_THROWS(resources::Resources().get("prompts/nope.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("schema checker") {
  const auto schema = nlohmann::json::parse(resources::Resources().get("schemas/repair.schema.json"));
  const auto ok = nlohmann::json::parse(R"({
    "edge_ops": [{"op": "retarget", "edge": {"src": "n1", "dst": "n2", "relation": "data_flow"},
                  "replacement": {"src": "n1", "dst": "n3", "relation": "data_flow"}}],
    "node_rewrites": [{"id": "n1", "faulty_lines": [3], "replacement_code": "x = 1"}],
    "rationale": "r",
    "rectified_graph": {"nodes": [{"id": "n1", "kind": "routine", "label": "f", "start_line": 1, "end_line": 4}],
                        "edges": []}})");
  CHECK(schema_violations(schema, ok).empty());
  auto bad = ok;
  bad["edge_ops"][0]["op"] = "teleport";
  bad["node_rewrites"][0].erase("id");
  const auto v = schema_violations(schema, bad);
  CHECK(v.size() == 2);
  CHECK(std::any_of(v.begin(), v.end(), [](const std::string& s) { return s.rfind("/edge_ops/0/op", 0) == 0; }));

  const nlohmann::json small = {{"type", "object"},
                                {"additionalProperties", false},
                                {"properties", {{"a/b", {{"type", "string"}, {"minLength", 2}}}}}};
  const auto w = schema_violations(small, {{"a/b", "x"}, {"z", 1}});
  CHECK(w.size() == 2);
  CHECK(std::any_of(w.begin(), w.end(), [](const std::string& s) { return s.rfind("/a~1b", 0) == 0; }));
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# run settings\n"
      "corpus = data/bugs\n"
      "strategy = 'cot,tot'\n"
      "\n"
      "[live]\n"
      "; endpoint\n"
      "url = \"https://example.test/v1/chat/completions\"\n");
  CHECK(c.at("corpus") == "data/bugs");
  CHECK(c.at("strategy") == "cot,tot");
  CHECK(c.at("live.url") == "https://example.test/v1/chat/completions");
  try {
    parse_config("a = 1\nnot a setting\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}
