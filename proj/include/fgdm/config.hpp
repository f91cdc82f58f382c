#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace fgdm {

/// Parses INI/TOML-style "key = value" text. "[section]" headers prefix the
/// following keys as "section.key"; '#' and ';' start comment lines; values
/// in double or single quotes are unquoted. Throws fgdm::Error with the line
/// number on malformed lines.
std::map<std::string, std::string> parse_config(std::string_view text);

std::map<std::string, std::string> load_config(const std::filesystem::path& path);

}  // namespace fgdm
