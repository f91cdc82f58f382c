#include "fgdm/harness.hpp"

#include "fgdm/text.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace fgdm {

namespace fs = std::filesystem;

std::vector<CorpusEntry> discover_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<CorpusEntry> entries;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const fs::path& p = item.path();
    const auto dialect = dialect_for(p);
    if (!dialect) continue;
    const std::string ext = p.extension().string();
    const std::string stem = p.stem().string();
    if (stem.size() <= 6 || !stem.ends_with(".buggy")) continue;
    const std::string name = stem.substr(0, stem.size() - 6);

    CorpusEntry e;
    e.buggy_path = p;
    e.dialect = *dialect;
    e.relpath = fs::relative(p, dir).generic_string();
    const fs::path truth = p.parent_path() / (name + ".fixed" + ext);
    if (fs::is_regular_file(truth)) e.truth_path = truth;
    const auto slash = e.relpath.find('/');
    e.project = slash == std::string::npos ? name : e.relpath.substr(0, slash);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw EmptyCorpus("no <name>.buggy.<ext> files under " + dir.string());
  std::sort(entries.begin(), entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.relpath < b.relpath; });
  return entries;
}

void RunConfig::validate() const {
  if (corpus_dir.empty()) throw Error("no corpus directory given");
  if (out_dir.empty()) throw Error("no output directory given");
  if (strategies.empty()) throw Error("no strategy selected");
  if (concurrency < 1) throw Error("concurrency must be at least 1");
  if (retrieval_k < 1) throw Error("retrieval_k must be at least 1");
  if (in_flight_limit < 1) throw Error("in-flight limit must be at least 1");
  if (temperature < 0.0 || temperature > 1.0) throw Error("temperature must lie in [0, 1]");
  if (max_output_tokens < 1) throw Error("max_output_tokens must be positive");
  if (backend == llm::BackendKind::scripted && !fixtures_path) {
    throw Error("the scripted backend needs a fixtures file");
  }
  if (backend == llm::BackendKind::live && (live.url.empty() || live.model.empty())) {
    throw Error("the live backend needs live.url and live.model");
  }
}

namespace {

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("setting " + key + " expects an integer, got '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("setting " + key + " expects a number, got '" + value + "'");
}

std::vector<Strategy> parse_strategies(const std::string& list) {
  std::vector<Strategy> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto s = parse_strategy(text::trim(item));
    if (!s) throw Error("unknown strategy '" + item + "'");
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  return out;
}

}  // namespace

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) {
    if (key == "corpus") {
      cfg.corpus_dir = value;
    } else if (key == "strategy" || key == "strategies") {
      cfg.strategies = parse_strategies(value);
    } else if (key == "backend") {
      if (value == "live") {
        cfg.backend = llm::BackendKind::live;
      } else if (value == "scripted") {
        cfg.backend = llm::BackendKind::scripted;
      } else {
        throw Error("unknown backend '" + value + "'");
      }
    } else if (key == "fixtures") {
      cfg.fixtures_path = value;
    } else if (key == "knowledge_store") {
      cfg.knowledge_store_path = value;
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "concurrency") {
      cfg.concurrency = to_int(key, value);
    } else if (key == "retrieval_k") {
      cfg.retrieval_k = to_int(key, value);
    } else if (key == "in_flight") {
      cfg.in_flight_limit = to_int(key, value);
    } else if (key == "temperature") {
      cfg.temperature = to_double(key, value);
    } else if (key == "max_output_tokens") {
      cfg.max_output_tokens = to_int(key, value);
    } else if (key == "resource_dir") {
      cfg.resource_dir = value;
    } else if (key == "live.url") {
      cfg.live.url = value;
    } else if (key == "live.model") {
      cfg.live.model = value;
    } else if (key == "live.max_retries") {
      cfg.live.max_retries = to_int(key, value);
    } else if (key == "live.initial_backoff_ms") {
      cfg.live.initial_backoff = std::chrono::milliseconds(to_int(key, value));
    } else if (key == "live.timeout_s") {
      cfg.live.timeout = std::chrono::seconds(to_int(key, value));
    } else {
      throw Error("unknown setting '" + key + "'");
    }
  }
}

RunResult run_corpus(const RunConfig& cfg, std::shared_ptr<llm::Backend> backend) {
  cfg.validate();
  const std::vector<CorpusEntry> entries = discover_corpus(cfg.corpus_dir);

  if (!backend) {
    if (cfg.backend == llm::BackendKind::scripted) {
      backend = std::make_shared<llm::ScriptedBackend>(
          std::make_shared<llm::FixtureStore>(llm::FixtureStore::load(*cfg.fixtures_path)));
    } else {
      llm::LiveConfig live = cfg.live;
      if (live.api_key.empty()) {
        if (const char* key = std::getenv("FGDM_API_KEY")) live.api_key = key;
      }
      backend = std::make_shared<llm::LiveBackend>(std::move(live));
    }
  }

  fs::create_directories(cfg.out_dir);
  auto transcript = std::make_shared<llm::Transcript>(cfg.out_dir / "transcript.jsonl");
  llm::Gateway gateway(backend, cfg.in_flight_limit, transcript);
  const resources::Resources res(cfg.resource_dir);
  const PromptLibrary prompts(res);

  retrieval::KnowledgeStore seed;
  if (cfg.knowledge_store_path && fs::exists(*cfg.knowledge_store_path)) {
    seed = retrieval::KnowledgeStore::load(*cfg.knowledge_store_path);
  }
  retrieval::KnowledgeStore sink;

  AgentContext ctx;
  ctx.gateway = &gateway;
  ctx.prompts = &prompts;
  ctx.resources = &res;
  ctx.knowledge = &seed;
  ctx.knowledge_sink = &sink;
  ctx.retrieval_k = cfg.retrieval_k;
  ctx.temperature = cfg.temperature;
  ctx.max_output_tokens = cfg.max_output_tokens;

  std::vector<PipelineInput> inputs;
  for (const CorpusEntry& e : entries) {
    PipelineInput in;
    in.file = e.relpath;
    in.source = text::read_file(e.buggy_path);
    if (e.truth_path) in.truth = text::read_file(*e.truth_path);
    in.dialect = e.dialect;
    inputs.push_back(std::move(in));
  }

  RunResult result;
  for (Strategy s : cfg.strategies) result.results.push_back({s, std::vector<PipelineRecord>(inputs.size())});

  const std::size_t jobs = cfg.strategies.size() * inputs.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t si = j / inputs.size();
      const std::size_t fi = j % inputs.size();
      const Strategy s = cfg.strategies[si];
      AgentContext local = ctx;
      result.results[si].records[fi] =
          run_pipeline(inputs[fi], s, local, cfg.out_dir / std::string(to_string(s)));
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(cfg.concurrency, static_cast<int>(std::max<std::size_t>(jobs, 1)));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  for (const StrategyResult& sr : result.results) {
    const fs::path dir = cfg.out_dir / std::string(to_string(sr.strategy)) / "results";
    text::write_file(dir / "output.json", output_json(sr).dump(2) + "\n");
    for (const PipelineRecord& r : sr.records) {
      if (r.error) {
        result.failures.push_back(std::string(to_string(sr.strategy)) + " " + r.file + ": " + *r.error);
      }
    }
  }
  text::write_file(cfg.out_dir / "summary.csv", summary_csv(result.results));
  text::write_file(cfg.out_dir / "report.txt", report_text(result.results));

  // Inserts from concurrent workers arrive in any order; sorting keeps the file stable.
  std::vector<retrieval::KnowledgeRecord> added = sink.records();
  std::sort(added.begin(), added.end(),
            [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
  retrieval::KnowledgeStore merged = seed;
  for (auto& r : added) {
    if (!merged.contains(r.record_id)) merged.insert(std::move(r));
  }
  merged.save(cfg.out_dir / "knowledge_store.json");
  return result;
}

namespace {

struct Column {
  std::string name;
  bool cosine = false;
  std::vector<std::optional<double>> cells;
  std::vector<bool> failed;
};

const metrics::MetricsRecord* pick(const PipelineRecord& r, metrics::Baseline b) {
  const auto& m = b == metrics::Baseline::source_vs_fixed ? r.metrics : r.truth_metrics;
  return m ? &*m : nullptr;
}

std::vector<double> present(const std::vector<std::optional<double>>& cells) {
  std::vector<double> v;
  for (const auto& c : cells) {
    if (c) v.push_back(*c);
  }
  return v;
}

nlohmann::json stats_json(const std::vector<double>& values) {
  if (values.empty()) return nullptr;
  const metrics::SummaryStats s = metrics::aggregate(values);
  nlohmann::json j{{"mean", s.mean},
                   {"median", s.median},
                   {"std_population", s.std_population},
                   {"n", s.n}};
  j["std_sample"] = s.std_sample ? nlohmann::json(*s.std_sample) : nlohmann::json(nullptr);
  return j;
}

constexpr metrics::Baseline kBaselines[] = {metrics::Baseline::source_vs_fixed,
                                            metrics::Baseline::fixed_vs_truth};
constexpr const char* kMetricNames[] = {"levenshtein", "line_dist", "cosine"};

double metric_value(const metrics::MetricsRecord& m, int which) {
  switch (which) {
    case 0:
      return static_cast<double>(m.levenshtein);
    case 1:
      return static_cast<double>(m.line_dist);
    default:
      return m.cosine;
  }
}

std::vector<double> metric_values(const StrategyResult& sr, metrics::Baseline b, int which) {
  std::vector<double> v;
  for (const PipelineRecord& r : sr.records) {
    if (r.error) continue;
    if (const auto* m = pick(r, b)) v.push_back(metric_value(*m, which));
  }
  return v;
}

std::string fmt(double v, const char* format) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

nlohmann::json output_json(const StrategyResult& sr) {
  nlohmann::json records = nlohmann::json::array();
  for (const PipelineRecord& r : sr.records) records.push_back(to_json(r));
  nlohmann::json summary = nlohmann::json::object();
  for (metrics::Baseline b : kBaselines) {
    nlohmann::json per_metric = nlohmann::json::object();
    bool any = false;
    for (int m = 0; m < 3; ++m) {
      const auto values = metric_values(sr, b, m);
      any = any || !values.empty();
      per_metric[kMetricNames[m]] = stats_json(values);
    }
    if (any) summary[std::string(metrics::to_string(b))] = per_metric;
  }
  return {{"strategy", to_string(sr.strategy)}, {"records", records}, {"summary", summary}};
}

std::string summary_csv(const std::vector<StrategyResult>& results) {
  std::string out = "strategy,metric,mean,median,std_population,std_sample\n";
  for (const StrategyResult& sr : results) {
    for (metrics::Baseline b : kBaselines) {
      for (int m = 0; m < 3; ++m) {
        const auto values = metric_values(sr, b, m);
        if (values.empty()) continue;
        const metrics::SummaryStats s = metrics::aggregate(values);
        out += std::string(to_string(sr.strategy)) + "," + kMetricNames[m] + "/" +
               std::string(metrics::to_string(b)) + "," + fmt(s.mean, "%.10g") + "," +
               fmt(s.median, "%.10g") + "," + fmt(s.std_population, "%.10g") + "," +
               (s.std_sample ? fmt(*s.std_sample, "%.10g") : std::string()) + "\n";
      }
    }
  }
  return out;
}

std::string report_text(const std::vector<StrategyResult>& results) {
  std::ostringstream out;
  if (results.empty()) return {};
  std::vector<std::string> files;
  for (const PipelineRecord& r : results.front().records) files.push_back(r.file);

  for (const auto& [language, dialect] :
       {std::pair<const char*, Dialect>{"Python", Dialect::indentation}, {"C", Dialect::brace}}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (dialect_for(files[i]) == dialect) rows.push_back(i);
    }
    if (rows.empty()) continue;

    for (metrics::Baseline b : kBaselines) {
      std::vector<Column> columns;
      for (int metric : {0, 2}) {
        for (const StrategyResult& sr : results) {
          Column c;
          c.cosine = metric == 2;
          c.name = std::string(c.cosine ? "Cosine " : "LD ") + std::string(to_string(sr.strategy));
          for (std::size_t i : rows) {
            const PipelineRecord& r = sr.records[i];
            const auto* m = r.error ? nullptr : pick(r, b);
            c.cells.push_back(m ? std::optional<double>(metric_value(*m, metric)) : std::nullopt);
            c.failed.push_back(r.error.has_value());
          }
          columns.push_back(std::move(c));
        }
      }
      bool any = false;
      for (const Column& c : columns) any = any || !present(c.cells).empty();
      if (!any) continue;

      std::size_t name_width = 6;
      for (std::size_t i : rows) name_width = std::max(name_width, files[i].size());
      std::size_t cell_width = 12;
      for (const Column& c : columns) cell_width = std::max(cell_width, c.name.size());

      auto pad = [](const std::string& s, std::size_t w) {
        return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
      };
      auto left = [](const std::string& s, std::size_t w) {
        return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
      };

      out << language << " programs, " << metrics::to_string(b) << "\n";
      std::string line = left("Name", name_width);
      for (const Column& c : columns) line += " | " + pad(c.name, cell_width);
      out << line << "\n" << std::string(line.size(), '-') << "\n";
      for (std::size_t k = 0; k < rows.size(); ++k) {
        std::string row = left(files[rows[k]], name_width);
        for (const Column& c : columns) {
          const auto& cell = c.cells[k];
          std::string v = c.failed[k] ? "ERR" : "-";
          if (cell) v = c.cosine ? fmt(*cell, "%.4f") : fmt(*cell, "%.0f");
          row += " | " + pad(v, cell_width);
        }
        out << row << "\n";
      }
      out << std::string(line.size(), '-') << "\n";
      for (const char* label : {"MEAN", "MEDIAN", "STD DEV"}) {
        std::string row = left(label, name_width);
        for (const Column& c : columns) {
          const auto values = present(c.cells);
          std::string v = "-";
          if (!values.empty()) {
            const metrics::SummaryStats s = metrics::aggregate(values);
            const std::string l = label;
            if (l == "MEAN") {
              v = fmt(s.mean, "%.6g");
            } else if (l == "MEDIAN") {
              v = fmt(s.median, "%.6g");
            } else if (s.std_sample) {
              v = fmt(*s.std_sample, "%.6g");
            }
          }
          row += " | " + pad(v, cell_width);
        }
        out << row << "\n";
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace fgdm
