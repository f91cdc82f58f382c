#include "fgdm/agents.hpp"
#include "fgdm/config.hpp"
#include "fgdm/dot.hpp"
#include "fgdm/harness.hpp"
#include "fgdm/metrics.hpp"
#include "fgdm/text.hpp"
#include "fgdm/validation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>

namespace fs = std::filesystem;
using namespace fgdm;

namespace {

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(text::read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

struct RunArgs {
  std::string corpus, strategy, backend, fixtures, out, knowledge_store, config, resource_dir;
  std::string live_url, model;
  int concurrency = 1;
  int retrieval_k = 3;
  int in_flight = 4;
  double temperature = 0.0;
};

/// Config file first, then every flag the user actually passed.
RunConfig build_run_config(const RunArgs& a, const CLI::App& cmd) {
  std::map<std::string, std::string> settings;
  if (!a.config.empty()) settings = load_config(a.config);
  auto given = [&](const char* flag) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--corpus")) settings["corpus"] = a.corpus;
  if (given("--strategy")) settings["strategy"] = a.strategy;
  if (given("--backend")) settings["backend"] = a.backend;
  if (given("--fixtures")) settings["fixtures"] = a.fixtures;
  if (given("--out")) settings["out"] = a.out;
  if (given("--knowledge-store")) settings["knowledge_store"] = a.knowledge_store;
  if (given("--concurrency")) settings["concurrency"] = std::to_string(a.concurrency);
  if (given("--retrieval-k")) settings["retrieval_k"] = std::to_string(a.retrieval_k);
  if (given("--in-flight")) settings["in_flight"] = std::to_string(a.in_flight);
  if (given("--temperature")) settings["temperature"] = std::to_string(a.temperature);
  if (given("--prompt-dir")) settings["resource_dir"] = a.resource_dir;
  if (given("--live-url")) settings["live.url"] = a.live_url;
  if (given("--model")) settings["live.model"] = a.model;

  RunConfig cfg;
  apply_config(cfg, settings);
  if (cfg.out_dir.empty()) cfg.out_dir = fs::path("runs") / timestamp();
  return cfg;
}

int cmd_run(const RunArgs& a, const CLI::App& cmd) {
  const RunConfig cfg = build_run_config(a, cmd);
  const RunResult result = run_corpus(cfg);
  std::size_t records = 0;
  for (const auto& sr : result.results) records += sr.records.size();
  std::cout << records << " records written to " << cfg.out_dir.string() << "\n";
  for (const std::string& f : result.failures) std::cerr << "failed: " << f << "\n";
  return result.exit_code();
}

int cmd_validate(const std::string& original, const std::string& repaired, const std::string& plan,
                 const std::string& diagnosis) {
  const FlowGraph g0 = parse_dot(original);
  const FlowGraph g1 = parse_dot(repaired);
  RepairPlan p = plan_from_json(read_json(plan));
  p.rectified_graph = g1;
  const Diagnosis d = diagnosis_from_json(read_json(diagnosis));
  ValidationReport report;
  try {
    report = validate_repair(g0, g1, p, d);
  } catch (const InconsistentPlan& e) {
    report = evaluate_constraints(g0, g1, p, d);
    report.plan_error = e.what();
    report.passed = false;
  }
  std::cout << to_json(report).dump(2) << "\n";
  return report.passed ? 0 : 1;
}

int cmd_metrics(const std::string& a, const std::string& b) {
  const std::string ta = text::read_file(a);
  const std::string tb = text::read_file(b);
  const metrics::MetricsRecord m = metrics::measure(ta, tb, metrics::Baseline::source_vs_fixed);
  std::cout << nlohmann::json{{"levenshtein", m.levenshtein},
                              {"line_dist", m.line_dist},
                              {"cosine", m.cosine}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_graph(const RunArgs& a, const std::string& file, const CLI::App& cmd) {
  RunConfig cfg = build_run_config(a, cmd);
  const auto dialect = dialect_for(file);
  if (!dialect) throw Error("unsupported file type: " + file);
  const auto strategy = parse_strategy(a.strategy);
  if (!strategy) throw Error("graph takes a single strategy, got '" + a.strategy + "'");

  std::shared_ptr<llm::Backend> backend;
  if (cfg.backend == llm::BackendKind::scripted) {
    if (!cfg.fixtures_path) throw Error("the scripted backend needs --fixtures");
    backend = std::make_shared<llm::ScriptedBackend>(
        std::make_shared<llm::FixtureStore>(llm::FixtureStore::load(*cfg.fixtures_path)));
  } else {
    if (const char* key = std::getenv("FGDM_API_KEY")) cfg.live.api_key = key;
    backend = std::make_shared<llm::LiveBackend>(cfg.live);
  }
  llm::Gateway gateway(backend, cfg.in_flight_limit);
  const resources::Resources res(cfg.resource_dir);
  const PromptLibrary prompts(res);
  AgentContext ctx;
  ctx.gateway = &gateway;
  ctx.prompts = &prompts;
  ctx.resources = &res;
  ctx.temperature = cfg.temperature;

  const std::string source = text::read_file(file);
  AgentSession session{fs::path(file).generic_string(), *dialect == Dialect::indentation ? "Python" : "C",
                       {}, {}};
  const Agent1Result r = agent1_build(source, segment(source, *dialect), *strategy, ctx, session);
  for (const std::string& w : session.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << to_dot(r.graph);
  return 0;
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--strategy", a.strategy, "Comma-separated subset of standard,cot,tot")
      ->default_val("standard,cot,tot");
  cmd->add_option("--backend", a.backend, "scripted or live")
      ->check(CLI::IsMember({"scripted", "live"}));
  cmd->add_option("--fixtures", a.fixtures, "Fixture store for the scripted backend");
  cmd->add_option("--config", a.config, "key = value settings file; flags win");
  cmd->add_option("--prompt-dir", a.resource_dir,
                  "Directory with prompts/ and schemas/ files overriding the built-in ones");
  cmd->add_option("--live-url", a.live_url, "Chat-completions endpoint for the live backend");
  cmd->add_option("--model", a.model, "Model name for the live backend");
  cmd->add_option("--temperature", a.temperature, "Sampling temperature")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--in-flight", a.in_flight, "Concurrent provider calls")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-graph driven multi-agent program repair"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the pipeline over a corpus");
  run->add_option("--corpus", run_args.corpus, "Corpus directory");
  run->add_option("--out", run_args.out, "Run directory (default runs/<timestamp>)");
  run->add_option("--knowledge-store", run_args.knowledge_store, "Knowledge store to seed retrieval");
  run->add_option("--concurrency", run_args.concurrency, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--retrieval-k", run_args.retrieval_k, "Records retrieved per query")
      ->check(CLI::PositiveNumber);
  add_run_options(run, run_args);

  std::string original, repaired, plan, diagnosis;
  auto* validate = app.add_subcommand("validate-repair", "Check a repair against the three constraints");
  validate->add_option("--original", original, "Original graph (DOT)")->required();
  validate->add_option("--repaired", repaired, "Repaired graph (DOT)")->required();
  validate->add_option("--plan", plan, "Repair plan (JSON)")->required();
  validate->add_option("--diagnosis", diagnosis, "Diagnosis (JSON)")->required();

  std::string file_a, file_b;
  auto* metrics_cmd = app.add_subcommand("metrics", "Levenshtein, line and cosine metrics of two files");
  metrics_cmd->add_option("--a", file_a, "First file")->required();
  metrics_cmd->add_option("--b", file_b, "Second file")->required();

  RunArgs graph_args;
  std::string graph_file;
  auto* graph = app.add_subcommand("graph", "Build the flow graph of one file (Agent 1 only)");
  graph->add_option("--file", graph_file, "Source file")->required();
  add_run_options(graph, graph_args);
  graph->get_option("--strategy")->default_val("standard");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args, *run);
    if (*validate) return cmd_validate(original, repaired, plan, diagnosis);
    if (*metrics_cmd) return cmd_metrics(file_a, file_b);
    if (*graph) return cmd_graph(graph_args, graph_file, *graph);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
