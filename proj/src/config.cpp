#include "fgdm/config.hpp"

#include "fgdm/error.hpp"
#include "fgdm/text.hpp"

namespace fgdm {

std::map<std::string, std::string> parse_config(std::string_view source) {
  std::map<std::string, std::string> out;
  std::string section;
  int number = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++number;
    const std::string_view line = text::trim(text::strip_cr(raw));
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("config line " + std::to_string(number) + ": bad section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    std::string_view value = text::trim(line.substr(eq + 1));
    if (key.empty()) throw Error("config line " + std::to_string(number) + ": empty key");
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    out[section.empty() ? key : section + "." + key] = std::string(value);
  }
  return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error("config file not found: " + path.string());
  return parse_config(text::read_file(path));
}

}  // namespace fgdm
