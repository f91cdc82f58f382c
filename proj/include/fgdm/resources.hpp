#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace fgdm::resources {

/// Schemas and prompt templates compiled into the binary, keyed by
/// "schemas/<file>" and "prompts/<file>".
const std::map<std::string, std::string>& embedded();

/// Resource lookup with an optional override directory. A file at
/// <override_dir>/<name> wins over the embedded copy.
class Resources {
 public:
  Resources() = default;
  explicit Resources(std::optional<std::filesystem::path> override_dir)
      : override_dir_(std::move(override_dir)) {}

  /// Throws fgdm::Error when the name is unknown.
  std::string get(const std::string& name) const;

 private:
  std::optional<std::filesystem::path> override_dir_;
};

}  // namespace fgdm::resources
