#include "wfwl/ntriples.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "wfwl/error.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

bool is_iri_forbidden(unsigned char c) {
  return c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
         c == '`' || c == '\\';
}

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
         c == '.' || static_cast<unsigned char>(c) >= 0x80;
}

// Cursor over one statement line.
class LineLexer {
 public:
  LineLexer(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at column " + std::to_string(pos_ + 1), line_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  bool rest_is_comment_or_empty() {
    skip_ws();
    return at_end() || s_[pos_] == '#';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint32_t hex(int digits) {
    std::uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      char c = peek();
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else fail("bad hex digit in escape");
      v = v * 16 + static_cast<std::uint32_t>(d);
      ++pos_;
    }
    if (v > 0x10ffff || (v >= 0xd800 && v <= 0xdfff)) fail("escape is not a Unicode scalar value");
    return v;
  }

  std::string iriref() {
    expect('<');
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = s_[pos_];
      if (c == '>') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        ++pos_;
        char e = peek();
        ++pos_;
        if (e == 'u') append_utf8(out, hex(4));
        else if (e == 'U') append_utf8(out, hex(8));
        else fail("invalid escape in IRI");
        continue;
      }
      if (is_iri_forbidden(static_cast<unsigned char>(c))) fail("character not allowed in IRI");
      out.push_back(c);
      ++pos_;
    }
  }

  std::string blank_label() {
    expect('_');
    expect(':');
    std::size_t start = pos_;
    while (!at_end() && is_label_char(s_[pos_])) ++pos_;
    // A label may not end in '.', which then belongs to the statement.
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    if (s_[start] == '-' || s_[start] == '.') fail("invalid blank node label");
    return std::string(s_.substr(start, pos_ - start));
  }

  Term literal() {
    expect('"');
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      char e = peek();
      ++pos_;
      switch (e) {
        case 't': value.push_back('\t'); break;
        case 'b': value.push_back('\b'); break;
        case 'n': value.push_back('\n'); break;
        case 'r': value.push_back('\r'); break;
        case 'f': value.push_back('\f'); break;
        case '"': value.push_back('"'); break;
        case '\'': value.push_back('\''); break;
        case '\\': value.push_back('\\'); break;
        case 'u': append_utf8(value, hex(4)); break;
        case 'U': append_utf8(value, hex(8)); break;
        default: fail("invalid escape in literal");
      }
    }
    if (peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())))) ++pos_;
      if (pos_ == start) fail("empty language tag");
      while (peek() == '-') {
        ++pos_;
        std::size_t sub = pos_;
        while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == sub) fail("empty language subtag");
      }
      return Term::literal(std::move(value), {}, std::string(s_.substr(start, pos_ - start)));
    }
    if (peek() == '^') {
      ++pos_;
      expect('^');
      return Term::literal(std::move(value), iriref());
    }
    return Term::literal(std::move(value));
  }

  Term term() {
    switch (peek()) {
      case '<': return Term::iri(iriref());
      case '_': return Term::blank(blank_label());
      case '"': return literal();
      default: fail("expected a term");
    }
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

Term skolemize(Term t, std::string_view scope) {
  if (t.kind != TermKind::BlankNode) return t;
  std::string iri(vocab::kGenIdPrefix);
  iri.append(scope).push_back(':');
  iri.append(t.lexical);
  return Term::iri(std::move(iri));
}

void escape_iri(std::string& out, std::string_view iri) {
  static const char* hexdigits = "0123456789ABCDEF";
  for (char c : iri) {
    auto u = static_cast<unsigned char>(c);
    if (is_iri_forbidden(u)) {
      out += "\\u00";
      out.push_back(hexdigits[u >> 4]);
      out.push_back(hexdigits[u & 0xf]);
    } else {
      out.push_back(c);
    }
  }
}

}  // namespace

std::string Term::to_ntriples() const {
  std::string out;
  switch (kind) {
    case TermKind::Iri:
      out.push_back('<');
      escape_iri(out, lexical);
      out.push_back('>');
      break;
    case TermKind::BlankNode:
      out = "_:" + lexical;
      break;
    case TermKind::Literal:
      out.push_back('"');
      for (char c : lexical) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\r': out += "\\r"; break;
          default: out.push_back(c);
        }
      }
      out.push_back('"');
      if (!lang.empty()) {
        out.push_back('@');
        out += lang;
      } else if (!datatype.empty()) {
        out += "^^<";
        escape_iri(out, datatype);
        out.push_back('>');
      }
      break;
  }
  return out;
}

Term Term::from_ntriples(std::string_view text) {
  LineLexer lex(text, 0);
  Term t = lex.term();
  if (!lex.at_end()) lex.fail("trailing characters after term");
  return t;
}

std::vector<RawTriple> parse_ntriples(std::istream& in, std::string_view skolem_scope) {
  std::vector<RawTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineLexer lex(line, line_no);
    if (lex.rest_is_comment_or_empty()) continue;
    RawTriple t;
    t.subject = lex.term();
    if (t.subject.is_literal()) lex.fail("literal in subject position");
    lex.skip_ws();
    if (lex.peek() != '<') lex.fail("predicate must be an IRI");
    t.predicate = Term::iri(lex.iriref());
    lex.skip_ws();
    t.object = lex.term();
    lex.skip_ws();
    lex.expect('.');
    if (!lex.rest_is_comment_or_empty()) lex.fail("unexpected characters after '.'");
    t.subject = skolemize(std::move(t.subject), skolem_scope);
    t.object = skolemize(std::move(t.object), skolem_scope);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<RawTriple> parse_ntriples(std::string_view text, std::string_view skolem_scope) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in, skolem_scope);
}

std::vector<RawTriple> parse_ntriples_file(const std::string& path, std::string_view skolem_scope) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path);
  return parse_ntriples(in, skolem_scope);
}

std::string to_ntriples(const RawTriple& t) {
  return t.subject.to_ntriples() + " " + t.predicate.to_ntriples() + " " + t.object.to_ntriples() + " .";
}

}  // namespace wfwl
