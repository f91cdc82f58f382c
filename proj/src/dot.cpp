#include "fgdm/dot.hpp"

#include "fgdm/text.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace fgdm {

ParseError::ParseError(const std::string& what, int line, int column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

bool is_bare_id(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return s != "digraph" && s != "graph" && s != "node" && s != "edge" && s != "subgraph" &&
         s != "strict";
}

std::string dot_id(std::string_view id) { return is_bare_id(id) ? std::string(id) : quote_dot(id); }

void emit_body(std::ostream& out, const FlowGraph& g) {
  out << "digraph G {\n";
  for (const CodeNode& n : g.nodes()) {
    out << "  " << dot_id(n.id) << " [kind=" << quote_dot(to_string(n.kind))
        << ", label=" << quote_dot(n.label) << ", span=\"" << n.span.start << '-' << n.span.end
        << "\"];\n";
  }
  for (const FlowEdge& e : g.edges()) {
    out << "  " << dot_id(e.src) << " -> " << dot_id(e.dst)
        << " [relation=" << quote_dot(to_string(e.relation)) << "];\n";
  }
  out << "}\n";
}

enum class Tok { id, lbrace, rbrace, lbracket, rbracket, equals, semicolon, comma, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string value;
  bool quoted = false;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  // Text of the first "// file: ..." comment seen before the first token.
  std::string file_comment;

  Token next() {
    skip_trivia();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    auto single = [&](Tok k) {
      advance();
      t.kind = k;
      return t;
    };
    switch (c) {
      case '{': return single(Tok::lbrace);
      case '}': return single(Tok::rbrace);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case '=': return single(Tok::equals);
      case ';': return single(Tok::semicolon);
      case ',': return single(Tok::comma);
      default: break;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Tok::arrow;
      return t;
    }
    if (c == '"') {
      t.kind = Tok::id;
      t.quoted = true;
      t.value = read_quoted(t.line, t.column);
      return t;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
        static_cast<unsigned char>(c) >= 0x80) {
      t.kind = Tok::id;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' ||
              static_cast<unsigned char>(d) >= 0x80)) {
          break;
        }
        t.value.push_back(d);
        advance();
      }
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' && column_ == 1) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (text_.substr(pos_, 2) == "//") {
        const std::size_t start = pos_ + 2;
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        const std::string_view body = text::trim(text_.substr(start, pos_ - start));
        if (!seen_token_ && file_comment.empty() && body.substr(0, 5) == "file:") {
          file_comment = std::string(text::trim(body.substr(5)));
        }
      } else if (text_.substr(pos_, 2) == "/*") {
        const int l = line_, col = column_;
        const std::size_t close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) throw ParseError("unterminated comment", l, col);
        while (pos_ < close + 2) advance();
      } else {
        break;
      }
    }
    seen_token_ = true;
  }

  std::string read_quoted(int line, int column) {
    std::string out;
    advance();  // opening quote
    while (true) {
      if (pos_ >= text_.size()) throw ParseError("unterminated string", line, column);
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        if (pos_ + 1 >= text_.size()) throw ParseError("unterminated string", line, column);
        advance();
        const char e = text_[pos_];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          case '\n': break;  // line continuation
          default:
            out.push_back('\\');
            out.push_back(e);
        }
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  bool seen_token_ = false;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { shift(); }

  FlowGraph parse(std::string file) {
    expect_keyword("digraph");
    if (tok_.kind == Tok::id) shift();  // graph name is not retained
    expect(Tok::lbrace, "'{'");
    while (tok_.kind != Tok::rbrace) {
      if (tok_.kind == Tok::end) throw error("missing closing '}'");
      statement();
    }
    shift();
    if (tok_.kind != Tok::end) throw error("trailing content after graph");

    for (const auto& [edge, where] : edge_sites_) {
      for (const std::string* end : {&edge.src, &edge.dst}) {
        if (!declared_.count(*end)) {
          throw ParseError("edge endpoint '" + *end + "' is not a declared node", where.first,
                           where.second);
        }
      }
    }
    if (!lex_.file_comment.empty()) file = lex_.file_comment;
    std::vector<FlowEdge> edges;
    for (const auto& [edge, _] : edge_sites_) edges.push_back(edge);
    return FlowGraph(std::move(file), std::move(nodes_), std::move(edges));
  }

 private:
  using Attributes = std::map<std::string, std::string>;

  ParseError error(const std::string& what) const { return ParseError(what, tok_.line, tok_.column); }

  void shift() { tok_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) throw error(std::string("expected ") + what);
    shift();
  }

  void expect_keyword(std::string_view word) {
    if (tok_.kind != Tok::id || tok_.quoted || tok_.value != word) {
      throw error("expected '" + std::string(word) + "'");
    }
    shift();
  }

  void statement() {
    if (tok_.kind != Tok::id) throw error("expected node or edge statement");
    if (!tok_.quoted && (tok_.value == "subgraph" || tok_.value == "graph" ||
                         tok_.value == "node" || tok_.value == "edge")) {
      throw error("unsupported statement '" + tok_.value + "'");
    }
    const Token head = tok_;
    shift();
    if (tok_.kind == Tok::arrow) {
      shift();
      if (tok_.kind != Tok::id) throw error("expected edge target");
      const Token target = tok_;
      shift();
      if (tok_.kind == Tok::arrow) throw error("edge chains are not supported");
      Attributes attrs = attributes();
      edge(head, target, attrs);
    } else {
      Attributes attrs = attributes();
      node(head, attrs);
    }
    if (tok_.kind == Tok::semicolon) shift();
  }

  Attributes attributes() {
    Attributes attrs;
    if (tok_.kind != Tok::lbracket) return attrs;
    shift();
    while (tok_.kind != Tok::rbracket) {
      if (tok_.kind != Tok::id) throw error("expected attribute name");
      const Token name = tok_;
      shift();
      expect(Tok::equals, "'='");
      if (tok_.kind != Tok::id) throw error("expected attribute value");
      if (!attrs.emplace(name.value, tok_.value).second) {
        throw ParseError("duplicate attribute '" + name.value + "'", name.line, name.column);
      }
      shift();
      if (tok_.kind == Tok::comma || tok_.kind == Tok::semicolon) shift();
    }
    shift();
    return attrs;
  }

  void node(const Token& head, Attributes& attrs) {
    if (!declared_.insert(head.value).second) {
      throw ParseError("node '" + head.value + "' declared twice", head.line, head.column);
    }
    CodeNode n;
    n.id = head.value;
    for (const char* required : {"kind", "label", "span"}) {
      if (!attrs.count(required)) {
        throw ParseError("node '" + n.id + "' lacks attribute '" + required + "'", head.line,
                         head.column);
      }
    }
    if (attrs.size() != 3) {
      throw ParseError("node '" + n.id + "' has unsupported attributes", head.line, head.column);
    }
    const auto kind = parse_node_kind(attrs["kind"]);
    if (!kind || to_string(*kind) != attrs["kind"]) {
      throw ParseError("unknown node kind '" + attrs["kind"] + "'", head.line, head.column);
    }
    n.kind = *kind;
    n.label = attrs["label"];
    n.span = parse_span(attrs["span"], head);
    nodes_.push_back(std::move(n));
  }

  void edge(const Token& src, const Token& dst, Attributes& attrs) {
    if (attrs.size() != 1 || !attrs.count("relation")) {
      throw ParseError("edge must carry exactly the 'relation' attribute", src.line, src.column);
    }
    const auto relation = parse_relation(attrs["relation"]);
    if (!relation || to_string(*relation) != attrs["relation"]) {
      throw ParseError("unknown relation '" + attrs["relation"] + "'", src.line, src.column);
    }
    FlowEdge e{src.value, dst.value, *relation};
    if (e.relation == Relation::containment && e.src == e.dst) {
      throw ParseError("containment self-edge on '" + e.src + "'", src.line, src.column);
    }
    if (!edge_sites_.emplace(e, std::make_pair(src.line, src.column)).second) {
      throw ParseError("duplicate edge", src.line, src.column);
    }
  }

  static LineSpan parse_span(const std::string& value, const Token& at) {
    const auto dash = value.find('-');
    try {
      if (dash == std::string::npos) throw std::invalid_argument("no dash");
      std::size_t used = 0;
      const std::string a = value.substr(0, dash), b = value.substr(dash + 1);
      LineSpan span{std::stoi(a, &used), 0};
      if (used != a.size()) throw std::invalid_argument("junk");
      span.end = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument("junk");
      if (!span.valid()) throw std::invalid_argument("order");
      return span;
    } catch (const std::exception&) {
      throw ParseError("malformed span '" + value + "'", at.line, at.column);
    }
  }

  Lexer lex_;
  Token tok_;
  std::vector<CodeNode> nodes_;
  std::set<std::string> declared_;
  std::map<FlowEdge, std::pair<int, int>> edge_sites_;
};

}  // namespace

std::string quote_dot(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string clean_dot(const FlowGraph& g) {
  std::ostringstream out;
  emit_body(out, g);
  return out.str();
}

std::string to_dot(const FlowGraph& g) {
  std::ostringstream out;
  out << "// flow graph\n";
  if (!g.file().empty()) out << "// file: " << g.file() << "\n";
  emit_body(out, g);
  return out.str();
}

void write_dot(const FlowGraph& g, const std::filesystem::path& path) {
  text::write_file(path, to_dot(g));
}

FlowGraph parse_dot_text(std::string_view text, std::string file) {
  return Parser(text).parse(std::move(file));
}

FlowGraph parse_dot(const std::filesystem::path& path) {
  return parse_dot_text(text::read_file(path), path.string());
}

}  // namespace fgdm
