// Regenerates a scripted-backend fixture store from hand-authored agent
// payloads. The real pipeline runs against a backend that answers from the
// authored file, so every recorded digest matches what `fgdm run` will ask.
//
// Authored file layout:
//   {"files": {"<relpath>": {"<role>[/<stage>]": ENTRY}}}
//   ENTRY = {"payload": {...}, "reasoning": ["..."], "raw": "..."}
//           or {"standard": ENTRY, "cot": ENTRY, "tot": ENTRY, "*": ENTRY}
// A payload's "fixed_code_file" is replaced by "fixed_code" with that
// corpus file's contents. "raw" sends text verbatim instead of a payload.

#include "fgdm/harness.hpp"
#include "fgdm/text.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <mutex>

namespace fs = std::filesystem;
using namespace fgdm;

namespace {

struct Tag {
  std::string role, strategy, stage, file;
};

Tag parse_tag(const std::string& tag) {
  const auto at = tag.find('@');
  const auto s1 = tag.find('/');
  const auto s2 = tag.find('/', s1 + 1);
  if (at == std::string::npos || s1 == std::string::npos || s2 == std::string::npos || s2 > at) {
    throw Error("malformed tag " + tag);
  }
  return {tag.substr(0, s1), tag.substr(s1 + 1, s2 - s1 - 1), tag.substr(s2 + 1, at - s2 - 1),
          tag.substr(at + 1)};
}

std::vector<std::string> default_reasoning(const std::string& role, const std::string& strategy) {
  if (strategy == "cot") {
    return {"Step 1: Read the code block by block and note what each one defines and uses.",
            "Step 2: Relate the blocks through containment, data flow, control flow and calls.",
            "Step 3: Check the " + role + " result against the line numbers before answering."};
  }
  if (strategy == "tot") {
    return {"Branch A: take the blocks exactly as the pre-pass proposes. Rating: likely.",
            "Branch B: merge small neighbouring blocks. Rating: impossible, it hides structure.",
            "Branch C: split routines at every statement. Rating: impossible, too fine.",
            "Selected: Branch A, the only branch consistent with the input."};
  }
  return {"Result:"};
}

class AuthoringBackend : public llm::Backend {
 public:
  AuthoringBackend(nlohmann::json authored, fs::path corpus)
      : authored_(std::move(authored)), corpus_(std::move(corpus)) {}

  llm::CompletionResponse complete(const llm::CompletionRequest& req) override {
    const Tag t = parse_tag(req.tag);
    const std::string key = t.stage == "initial" ? t.role : t.role + "/" + t.stage;
    const auto& files = authored_.at("files");
    if (!files.contains(t.file) || !files[t.file].contains(key)) {
      throw Error("nothing authored for " + req.tag);
    }
    nlohmann::json entry = files[t.file][key];
    if (entry.contains(t.strategy)) {
      entry = entry[t.strategy];
    } else if (entry.contains("*")) {
      entry = entry["*"];
    }

    std::string text;
    if (entry.contains("raw")) {
      text = entry["raw"].get<std::string>();
    } else {
      nlohmann::json payload = entry.at("payload");
      if (payload.contains("fixed_code_file")) {
        payload["fixed_code"] = text::read_file(corpus_ / payload["fixed_code_file"].get<std::string>());
        payload.erase("fixed_code_file");
      }
      const auto reasoning = entry.contains("reasoning")
                                 ? entry["reasoning"].get<std::vector<std::string>>()
                                 : default_reasoning(t.role, t.strategy);
      for (const std::string& line : reasoning) text += line + "\n";
      text += "\n```json\n" + payload.dump(2) + "\n```\n";
    }

    std::lock_guard lock(mutex_);
    store_.add(req, text);
    return {text, 0, llm::BackendKind::scripted, 1};
  }

  const llm::FixtureStore& store() const { return store_; }

 private:
  nlohmann::json authored_;
  fs::path corpus_;
  std::mutex mutex_;
  llm::FixtureStore store_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Record scripted-backend fixtures from authored agent payloads"};
  std::string corpus, authored, out, work, strategies = "standard,cot,tot";
  app.add_option("--corpus", corpus, "Corpus directory")->required();
  app.add_option("--authored", authored, "Authored payload file")->required();
  app.add_option("--out", out, "Fixture store to write")->required();
  app.add_option("--work", work, "Scratch run directory")->required();
  app.add_option("--strategy", strategies, "Strategies to record");
  CLI11_PARSE(app, argc, argv);

  try {
    auto backend = std::make_shared<AuthoringBackend>(
        nlohmann::json::parse(text::read_file(authored)), corpus);
    RunConfig cfg;
    apply_config(cfg, {{"corpus", corpus}, {"strategy", strategies}, {"out", work}});
    cfg.fixtures_path = out;
    const RunResult result = run_corpus(cfg, backend);
    for (const std::string& f : result.failures) std::cerr << "record failed: " << f << "\n";
    backend->store().save(out);
    std::cout << backend->store().size() << " fixtures written to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
