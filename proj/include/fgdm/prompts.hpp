#pragma once

#include "fgdm/resources.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace fgdm {

enum class Strategy { standard, cot, tot };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

enum class AgentRole { graph_builder, fault_localizer, graph_repair, reconstruction };

std::string_view to_string(AgentRole role);

struct PromptTemplate {
  std::string system;
  std::string user;
};

/// Splits a template file at its "=== system ===" and "=== user ===" lines.
PromptTemplate parse_template(std::string_view text);

/// Replaces every {{name}} with vars[name]. Throws fgdm::Error for a name
/// without a value or an unterminated placeholder.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Templates by (agent, strategy), read from prompts/<agent>_<strategy>.txt.
class PromptLibrary {
 public:
  explicit PromptLibrary(resources::Resources resources = {}) : resources_(std::move(resources)) {}
  PromptTemplate get(AgentRole role, Strategy strategy) const;

 private:
  resources::Resources resources_;
};

}  // namespace fgdm
