#pragma once

#include "fgdm/graph.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace fgdm {

/// Malformed DOT input. line and column are 1-based; column counts bytes.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Canonical DOT body: no comments, nodes in graph order, attributes sorted
/// by name. This is the exact text embedded in repair prompts.
///
///   digraph G {
///     n0 [kind="routine", label="main", span="1-12"];
///     n0 -> n1 [relation="containment"];
///   }
std::string clean_dot(const FlowGraph& g);

/// clean_dot preceded by a comment header naming the source file.
std::string to_dot(const FlowGraph& g);
void write_dot(const FlowGraph& g, const std::filesystem::path& path);

/// Parses the DOT subset produced by to_dot. Comments (//, /* */, and lines
/// starting with '#') are skipped; a leading "// file: <path>" comment sets
/// the graph's file. Node code is left empty. Throws ParseError.
FlowGraph parse_dot_text(std::string_view text, std::string file = {});
FlowGraph parse_dot(const std::filesystem::path& path);

/// Double-quoted DOT string with backslash escapes for '"', '\\', and
/// newline, carriage return and tab.
std::string quote_dot(std::string_view s);

}  // namespace fgdm
