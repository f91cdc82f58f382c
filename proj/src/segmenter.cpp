#include "fgdm/segmenter.hpp"

#include "fgdm/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace fgdm {

std::string_view to_string(Dialect dialect) {
  return dialect == Dialect::indentation ? "indentation-structured" : "brace-structured";
}

std::optional<Dialect> dialect_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".py") return Dialect::indentation;
  if (ext == ".c" || ext == ".h") return Dialect::brace;
  return std::nullopt;
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Sorts and merges candidates that overlap at the same depth, keeping the
// kind of the earlier one.
std::vector<BlockCandidate> normalize(std::vector<BlockCandidate> in) {
  std::sort(in.begin(), in.end(), [](const BlockCandidate& a, const BlockCandidate& b) {
    if (a.nesting_depth != b.nesting_depth) return a.nesting_depth < b.nesting_depth;
    return a.span.start < b.span.start;
  });
  std::vector<BlockCandidate> out;
  for (const BlockCandidate& c : in) {
    if (!out.empty() && out.back().nesting_depth == c.nesting_depth &&
        c.span.start <= out.back().span.end) {
      out.back().span.end = std::max(out.back().span.end, c.span.end);
      continue;
    }
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const BlockCandidate& a, const BlockCandidate& b) {
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.nesting_depth < b.nesting_depth;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Indentation-structured sources

struct LogicalLine {
  int first = 0;
  int last = 0;
  int indent = 0;
  std::string text;  // comments removed, string literals collapsed to 'S'
};

struct IndentLexResult {
  std::vector<LogicalLine> lines;
  std::set<int> code_lines;
};

IndentLexResult lex_indented(std::string_view source) {
  IndentLexResult result;
  const auto physical = text::split_lines(source);
  bool in_triple = false;
  char triple_quote = 0;
  int bracket_depth = 0;
  LogicalLine current;
  bool open = false;

  for (std::size_t li = 0; li < physical.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const std::string_view line = text::strip_cr(physical[li]);
    bool has_code = false;
    bool trailing_backslash = false;

    if (!open) {
      int indent = 0;
      for (char c : line) {
        if (c == ' ') {
          ++indent;
        } else if (c == '\t') {
          indent = (indent / 8 + 1) * 8;
        } else {
          break;
        }
      }
      current = LogicalLine{line_no, line_no, indent, {}};
    }

    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (in_triple) {
        if (line.compare(i, 3, std::string(3, triple_quote)) == 0) {
          in_triple = false;
          has_code = true;
          i += 3;
          continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) has_code = true;
        i += c == '\\' ? 2 : 1;
        continue;
      }
      if (c == '#') break;
      if (c == '"' || c == '\'') {
        has_code = true;
        current.text.push_back('S');
        if (line.compare(i, 3, std::string(3, c)) == 0) {
          in_triple = true;
          triple_quote = c;
          i += 3;
          continue;
        }
        ++i;
        while (i < line.size() && line[i] != c) i += line[i] == '\\' ? 2 : 1;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!current.text.empty() && current.text.back() != ' ') current.text.push_back(' ');
        ++i;
        continue;
      }
      has_code = true;
      if (c == '(' || c == '[' || c == '{') ++bracket_depth;
      if (c == ')' || c == ']' || c == '}') bracket_depth = std::max(0, bracket_depth - 1);
      trailing_backslash = c == '\\';
      current.text.push_back(c);
      ++i;
      if (!std::isspace(static_cast<unsigned char>(c)) && c != '\\') trailing_backslash = false;
    }
    if (trailing_backslash && !current.text.empty() && current.text.back() == '\\') {
      current.text.pop_back();
    }

    if (has_code) {
      result.code_lines.insert(line_no);
      if (!open) {
        open = true;
        current.first = line_no;
      }
      current.last = line_no;
    }
    const bool continues = in_triple || bracket_depth > 0 || trailing_backslash;
    if (open && !continues) {
      while (!current.text.empty() && current.text.back() == ' ') current.text.pop_back();
      result.lines.push_back(std::move(current));
      current = LogicalLine{};
      open = false;
    }
  }
  if (open) result.lines.push_back(std::move(current));
  return result;
}

std::string first_word(std::string_view s, std::size_t from = 0) {
  std::size_t b = from;
  while (b < s.size() && s[b] == ' ') ++b;
  std::size_t e = b;
  while (e < s.size() && ident_char(s[e])) ++e;
  return std::string(s.substr(b, e - b));
}

struct Header {
  NodeKind kind;
  std::string keyword;
};

std::optional<Header> compound_header(const LogicalLine& l) {
  std::string kw = first_word(l.text);
  if (kw == "async") kw = first_word(l.text, 5);
  static const std::map<std::string, NodeKind, std::less<>> kinds{
      {"def", NodeKind::routine},    {"class", NodeKind::type_declaration},
      {"for", NodeKind::loop},       {"while", NodeKind::loop},
      {"if", NodeKind::branch},      {"try", NodeKind::branch},
      {"with", NodeKind::statement_group}};
  if (const auto it = kinds.find(kw); it != kinds.end()) return Header{it->second, kw};
  // soft keyword: "match <subject>:"
  if (kw == "match" && l.text.size() > 6 && l.text.back() == ':' &&
      (l.text[5] == ' ' || l.text[5] == '(')) {
    return Header{NodeKind::branch, kw};
  }
  return std::nullopt;
}

bool continues_clause(const std::string& header_kw, const LogicalLine& l) {
  const std::string kw = first_word(l.text);
  if (header_kw == "if") return kw == "elif" || kw == "else";
  if (header_kw == "for" || header_kw == "while") return kw == "else";
  if (header_kw == "try") return kw == "except" || kw == "else" || kw == "finally";
  return false;
}

class IndentSegmenter {
 public:
  explicit IndentSegmenter(const std::vector<LogicalLine>& lines) : lines_(lines) {}

  std::vector<BlockCandidate> run() {
    suite(0, lines_.size(), 0);
    return std::move(out_);
  }

 private:
  void suite(std::size_t begin, std::size_t end, int depth) {
    int group_start = 0, group_end = 0;
    auto flush = [&] {
      if (group_start > 0) out_.push_back({{group_start, group_end}, NodeKind::statement_group, 0});
      group_start = 0;
    };
    std::size_t i = begin;
    while (i < end) {
      std::size_t head = i;
      while (head + 1 < end && lines_[head].text.starts_with('@') &&
             lines_[head + 1].indent == lines_[i].indent) {
        ++head;
      }
      const auto header = compound_header(lines_[head]);
      if (!header) {
        if (depth == 0) {
          if (group_start == 0) group_start = lines_[i].first;
          group_end = lines_[i].last;
        }
        ++i;
        continue;
      }
      if (depth == 0) flush();
      const int indent = lines_[head].indent;
      std::vector<std::size_t> clause_heads{head};
      std::size_t j = head + 1;
      while (true) {
        while (j < end && lines_[j].indent > indent) ++j;
        if (j < end && lines_[j].indent == indent && continues_clause(header->keyword, lines_[j])) {
          clause_heads.push_back(j++);
          continue;
        }
        break;
      }
      out_.push_back({{lines_[i].first, lines_[j - 1].last}, header->kind, depth});
      for (std::size_t k = 0; k < clause_heads.size(); ++k) {
        const std::size_t body_begin = clause_heads[k] + 1;
        const std::size_t body_end = k + 1 < clause_heads.size() ? clause_heads[k + 1] : j;
        if (body_begin < body_end) suite(body_begin, body_end, depth + 1);
      }
      i = j;
    }
    if (depth == 0) flush();
  }

  const std::vector<LogicalLine>& lines_;
  std::vector<BlockCandidate> out_;
};

// ---------------------------------------------------------------------------
// Brace-structured sources

struct CToken {
  enum Kind { ident, number, punct, string, preproc } kind;
  std::string text;
  int line;
  int end_line;
};

std::vector<CToken> lex_braced(std::string_view s) {
  std::vector<CToken> toks;
  int line = 1;
  bool line_start = true;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        line_start = true;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      bump(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#' && line_start) {
      const int start = line;
      while (i < s.size() && s[i] != '\n') {
        if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == '\n' || s[i + 1] == '\r')) {
          bump(s[i + 1] == '\r' && i + 2 < s.size() && s[i + 2] == '\n' ? 3 : 2);
          line_start = false;
          continue;
        }
        if (s.compare(i, 2, "/*") == 0) {
          const auto close = s.find("*/", i + 2);
          bump(close == std::string_view::npos ? s.size() - i : close + 2 - i);
          line_start = false;
          continue;
        }
        ++i;
      }
      toks.push_back({CToken::preproc, "#", start, line});
      continue;
    }
    line_start = false;
    if (s.compare(i, 2, "//") == 0) {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (s.compare(i, 2, "/*") == 0) {
      const auto close = s.find("*/", i + 2);
      bump(close == std::string_view::npos ? s.size() - i : close + 2 - i);
      line_start = false;
      continue;
    }
    if (c == '"' || c == '\'') {
      const int start = line;
      ++i;
      while (i < s.size() && s[i] != c && s[i] != '\n') {
        if (s[i] == '\\' && i + 1 < s.size()) {
          bump(2);
          line_start = false;
          continue;
        }
        ++i;
      }
      if (i < s.size() && s[i] == c) ++i;
      toks.push_back({CToken::string, "S", start, line});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t b = i;
      while (i < s.size() && ident_char(s[i])) ++i;
      toks.push_back({CToken::ident, std::string(s.substr(b, i - b)), line, line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t b = i;
      while (i < s.size() && (ident_char(s[i]) || s[i] == '.')) ++i;
      toks.push_back({CToken::number, std::string(s.substr(b, i - b)), line, line});
      continue;
    }
    toks.push_back({CToken::punct, std::string(1, c), line, line});
    ++i;
  }
  return toks;
}

class BraceSegmenter {
 public:
  explicit BraceSegmenter(std::vector<CToken> toks) : t_(std::move(toks)) {}

  std::vector<BlockCandidate> run() {
    top_level();
    return std::move(out_);
  }

  std::optional<UnbalancedDelimiters> unbalanced;

 private:
  bool is(std::size_t i, std::string_view text) const {
    return i < t_.size() && (t_[i].kind == CToken::punct || t_[i].kind == CToken::ident) &&
           t_[i].text == text;
  }

  void report(int line, std::string detail) {
    if (!unbalanced) unbalanced = UnbalancedDelimiters{line, std::move(detail)};
  }

  // Index of the token closing the delimiter at `open`, bounded by `end`.
  // Returns end when unmatched and records the problem.
  std::size_t match(std::size_t open, std::size_t end) {
    const std::string& o = t_[open].text;
    const std::string c = o == "(" ? ")" : o == "[" ? "]" : "}";
    int depth = 0;
    for (std::size_t i = open; i < end; ++i) {
      if (t_[i].kind != CToken::punct) continue;
      if (t_[i].text == o) ++depth;
      if (t_[i].text == c && --depth == 0) return i;
    }
    report(t_[open].line, "unmatched '" + o + "'");
    return end;
  }

  int last_line(std::size_t idx, std::size_t end) const {
    const std::size_t k = std::min(idx, end - 1);
    return t_[k].end_line;
  }

  void top_level() {
    int group_start = 0, group_end = 0;
    auto extend_group = [&](int a, int b) {
      if (group_start == 0) group_start = a;
      group_end = std::max(group_end, b);
    };
    auto flush = [&] {
      if (group_start > 0) out_.push_back({{group_start, group_end}, NodeKind::statement_group, 0});
      group_start = 0;
      group_end = 0;
    };
    auto own_block = [&](int a, int b, NodeKind kind) {
      flush();
      out_.push_back({{a, b}, kind, 0});
    };

    const std::size_t n = t_.size();
    std::size_t i = 0;
    while (i < n) {
      if (t_[i].kind == CToken::preproc) {
        extend_group(t_[i].line, t_[i].end_line);
        ++i;
        continue;
      }
      if (is(i, "}") || is(i, ")") || is(i, "]")) {
        report(t_[i].line, "unexpected '" + t_[i].text + "'");
        extend_group(t_[i].line, t_[i].end_line);
        ++i;
        continue;
      }

      // One external declaration: up to ';', a routine body, or a stray closer.
      enum class Stop { semicolon, routine, closer, eof } stop = Stop::eof;
      const std::size_t begin = i;
      bool has_paren = false, has_assign = false, has_aggregate = false, has_typedef = false,
           has_brace = false;
      std::size_t j = i;
      while (j < n) {
        const CToken& tok = t_[j];
        if (tok.kind == CToken::ident) {
          if (tok.text == "struct" || tok.text == "union" || tok.text == "enum") has_aggregate = true;
          if (tok.text == "typedef") has_typedef = true;
          ++j;
        } else if (is(j, "(") || is(j, "[")) {
          if (is(j, "(") && !has_assign) has_paren = true;
          j = std::min(match(j, n) + 1, n);
        } else if (is(j, "=")) {
          has_assign = true;
          ++j;
        } else if (is(j, ";")) {
          stop = Stop::semicolon;
          break;
        } else if (is(j, "{")) {
          const std::size_t close = match(j, n);
          if (has_paren && !has_assign && !has_typedef) {
            own_block(t_[begin].line, last_line(close, n), NodeKind::routine);
            body(j + 1, close, 1);
            j = close;
            stop = Stop::routine;
            break;
          }
          has_brace = true;
          j = std::min(close + 1, n);
        } else if (is(j, "}") || is(j, ")") || is(j, "]")) {
          stop = Stop::closer;
          break;
        } else {
          ++j;
        }
      }

      if (stop == Stop::routine) {
        i = j + 1;
        continue;
      }
      const std::size_t last_tok = stop == Stop::semicolon ? j : j - 1;
      if (j > begin || stop == Stop::semicolon) {
        const int first = t_[begin].line;
        const int last = t_[std::min(last_tok, n - 1)].end_line;
        if (has_aggregate && has_brace && !has_assign) {
          own_block(first, last, NodeKind::type_declaration);
        } else if (stop == Stop::semicolon && has_paren && !has_assign && !has_typedef && !has_brace) {
          own_block(first, last, NodeKind::routine);
        } else {
          extend_group(first, last);
        }
      }
      i = stop == Stop::semicolon ? j + 1 : j;
    }
    flush();
  }

  void body(std::size_t begin, std::size_t end, int depth) {
    std::size_t i = begin;
    while (i < end) i = statement(i, end, depth);
  }

  // Skips a parenthesized condition at i (if present) and returns the index
  // after it.
  std::size_t condition(std::size_t i, std::size_t end) {
    if (i < end && is(i, "(")) return std::min(match(i, end) + 1, end);
    return i;
  }

  std::size_t statement(std::size_t i, std::size_t end, int depth) {
    if (i >= end) return end;
    const CToken& tok = t_[i];
    if (tok.kind == CToken::preproc) return i + 1;
    if (is(i, "{")) {
      const std::size_t close = match(i, end);
      body(i + 1, close, depth);
      return std::min(close + 1, end);
    }
    if (is(i, "}")) {
      report(tok.line, "unexpected '}'");
      return i + 1;
    }
    if (tok.kind == CToken::ident) {
      if (tok.text == "if") {
        std::size_t j = statement(condition(i + 1, end), end, depth + 1);
        while (j < end && is(j, "else")) {
          ++j;
          if (is(j, "if")) {
            j = statement(condition(j + 1, end), end, depth + 1);
          } else {
            j = statement(j, end, depth + 1);
          }
        }
        emit(i, j, end, NodeKind::branch, depth);
        return j;
      }
      if (tok.text == "for" || tok.text == "while" || tok.text == "switch") {
        const std::size_t j = statement(condition(i + 1, end), end, depth + 1);
        emit(i, j, end, tok.text == "switch" ? NodeKind::branch : NodeKind::loop, depth);
        return j;
      }
      if (tok.text == "do") {
        std::size_t j = statement(i + 1, end, depth + 1);
        if (is(j, "while")) j = condition(j + 1, end);
        if (is(j, ";")) ++j;
        emit(i, j, end, NodeKind::loop, depth);
        return j;
      }
      if (tok.text == "case" || tok.text == "default") {
        std::size_t j = i + 1;
        while (j < end && !is(j, ":")) ++j;
        return std::min(j + 1, end);
      }
    }
    // simple statement, braces allowed for initializer lists
    std::size_t j = i;
    while (j < end) {
      if (is(j, ";")) return j + 1;
      if (is(j, "}")) return j;
      if (is(j, "(") || is(j, "[") || is(j, "{")) {
        j = std::min(match(j, end) + 1, end);
        continue;
      }
      ++j;
    }
    return end;
  }

  void emit(std::size_t first, std::size_t past, std::size_t end, NodeKind kind, int depth) {
    out_.push_back({{t_[first].line, last_line(past - 1, end)}, kind, depth});
  }

  std::vector<CToken> t_;
  std::vector<BlockCandidate> out_;
};

}  // namespace

Segmentation segment(std::string_view source, Dialect dialect) {
  if (text::trim(source).empty()) throw Error("cannot segment an empty source");
  Segmentation seg;
  seg.line_count = static_cast<int>(text::split_lines(source).size());
  if (dialect == Dialect::indentation) {
    auto lexed = lex_indented(source);
    seg.code_lines.assign(lexed.code_lines.begin(), lexed.code_lines.end());
    seg.candidates = normalize(IndentSegmenter(lexed.lines).run());
  } else {
    auto toks = lex_braced(source);
    std::set<int> code;
    for (const CToken& t : toks) {
      for (int l = t.line; l <= t.end_line; ++l) code.insert(l);
    }
    seg.code_lines.assign(code.begin(), code.end());
    BraceSegmenter segmenter(std::move(toks));
    seg.candidates = normalize(segmenter.run());
    seg.unbalanced = segmenter.unbalanced;
  }
  return seg;
}

CoverageReport coverage_check(const Segmentation& segmentation, const FlowGraph& graph) {
  CoverageReport report;
  std::vector<bool> claimed(static_cast<std::size_t>(segmentation.line_count) + 2, false);
  for (const CodeNode& n : graph.nodes()) {
    if (n.span.start < 1 || n.span.end > segmentation.line_count) {
      report.out_of_bounds.emplace_back(n.id, n.span);
    }
    const int last = std::min(n.span.end, segmentation.line_count);
    for (int l = std::max(n.span.start, 1); l <= last; ++l) claimed[static_cast<std::size_t>(l)] = true;
  }
  for (int l : segmentation.code_lines) {
    if (claimed[static_cast<std::size_t>(l)]) continue;
    if (!report.uncovered.empty() && report.uncovered.back().end == l - 1) {
      report.uncovered.back().end = l;
    } else {
      report.uncovered.push_back({l, l});
    }
  }
  return report;
}

std::string describe(const Segmentation& segmentation) {
  std::ostringstream out;
  for (const BlockCandidate& c : segmentation.candidates) {
    out << std::string(static_cast<std::size_t>(c.nesting_depth) * 2, ' ') << "- lines "
        << c.span.start << "-" << c.span.end << ": " << to_string(c.kind_hint) << "\n";
  }
  if (segmentation.unbalanced) {
    out << "(delimiters unbalanced near line " << segmentation.unbalanced->line << ")\n";
  }
  return out.str();
}

}  // namespace fgdm
