#include "fgdm/prompts.hpp"

#include "fgdm/error.hpp"
#include "fgdm/text.hpp"

#include <array>

namespace fgdm {

namespace {

constexpr std::array<std::string_view, 3> kStrategyNames{"standard", "cot", "tot"};
constexpr std::array<std::string_view, 4> kRoleNames{"graph_builder", "fault_localizer",
                                                     "graph_repair", "reconstruction"};
constexpr std::string_view kSystemMarker = "=== system ===";
constexpr std::string_view kUserMarker = "=== user ===";

}  // namespace

std::string_view to_string(Strategy strategy) {
  return kStrategyNames[static_cast<std::size_t>(strategy)];
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == name) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AgentRole role) { return kRoleNames[static_cast<std::size_t>(role)]; }

PromptTemplate parse_template(std::string_view text) {
  PromptTemplate t;
  std::string* current = nullptr;
  for (std::string_view line : text::split_lines(text)) {
    const std::string_view bare = text::trim(line);
    if (bare == kSystemMarker) {
      current = &t.system;
    } else if (bare == kUserMarker) {
      current = &t.user;
    } else if (current) {
      current->append(line);
      current->push_back('\n');
    }
  }
  if (t.user.empty()) throw Error("prompt template has no user section");
  return t;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw Error("unterminated placeholder in prompt template");
    const std::string name(text::trim(tmpl.substr(open + 2, close - open - 2)));
    auto it = vars.find(name);
    if (it == vars.end()) throw Error("prompt template uses unknown placeholder '" + name + "'");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

PromptTemplate PromptLibrary::get(AgentRole role, Strategy strategy) const {
  return parse_template(resources_.get("prompts/" + std::string(to_string(role)) + "_" +
                                       std::string(to_string(strategy)) + ".txt"));
}

}  // namespace fgdm
