#include "wfwl/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "wfwl/error.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

enum class Tok : std::uint8_t { Iri, PName, Var, String, LangTag, Carets, Number, Word, Punct, Blank, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // IRI / variable name / unescaped string / word / punctuation
  std::size_t pos = 0;
  std::string number_type;  // for numbers: xsd local name
};

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = i_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw QueryError(what, at); }

  void skip_space() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else {
        break;
      }
    }
  }

  bool try_iri(Token& t) {
    std::size_t j = i_ + 1;
    std::string value;
    while (j < s_.size() && s_[j] != '>') {
      char c = s_[j];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`' || c == '\\')
        return false;
      value += c;
      ++j;
    }
    if (j >= s_.size()) return false;
    t.kind = Tok::Iri;
    t.text = std::move(value);
    i_ = j + 1;
    return true;
  }

  std::uint32_t hex(std::size_t n) {
    if (i_ + n > s_.size()) fail("truncated unicode escape", i_);
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < n; ++k) {
      char c = s_[i_ + k];
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("invalid unicode escape", i_ + k);
    }
    i_ += n;
    return v;
  }

  void lex_string(Token& t) {
    char q = s_[i_];
    bool longq = s_.substr(i_, 3) == std::string(3, q);
    i_ += longq ? 3 : 1;
    std::string v;
    for (;;) {
      if (i_ >= s_.size()) fail("unterminated string", t.pos);
      char c = s_[i_];
      if (longq ? s_.substr(i_, 3) == std::string(3, q) : c == q) {
        i_ += longq ? 3 : 1;
        break;
      }
      if (!longq && (c == '\n' || c == '\r')) fail("newline in string", i_);
      if (c == '\\') {
        if (++i_ >= s_.size()) fail("unterminated escape", i_);
        char e = s_[i_++];
        switch (e) {
          case 't': v += '\t'; break;
          case 'n': v += '\n'; break;
          case 'r': v += '\r'; break;
          case 'b': v += '\b'; break;
          case 'f': v += '\f'; break;
          case '"': v += '"'; break;
          case '\'': v += '\''; break;
          case '\\': v += '\\'; break;
          case 'u': append_utf8(v, hex(4)); break;
          case 'U': append_utf8(v, hex(8)); break;
          default: fail("invalid escape", i_ - 1);
        }
        continue;
      }
      v += c;
      ++i_;
    }
    t.kind = Tok::String;
    t.text = std::move(v);
  }

  void lex_number(Token& t) {
    std::size_t j = i_;
    if (s_[j] == '+' || s_[j] == '-') ++j;
    bool digits = false, dot = false, exp = false;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j, digits = true;
    if (j + 1 < s_.size() && s_[j] == '.' && std::isdigit(static_cast<unsigned char>(s_[j + 1]))) {
      dot = true;
      ++j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    }
    if (digits && j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
        exp = true;
        j = k;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      }
    }
    t.kind = Tok::Number;
    t.text = std::string(s_.substr(i_, j - i_));
    t.number_type = exp ? "double" : dot ? "decimal" : "integer";
    i_ = j;
  }

  void lex_one(Token& t) {
    char c = s_[i_];
    if (c == '<' && try_iri(t)) return;
    if (c == '?' || c == '$') {
      std::size_t j = i_ + 1;
      while (j < s_.size() && (is_name_char(s_[j]))) ++j;
      if (j == i_ + 1) fail("empty variable name", i_);
      t.kind = Tok::Var;
      t.text = std::string(s_.substr(i_ + 1, j - i_ - 1));
      i_ = j;
      return;
    }
    if (c == '"' || c == '\'') return lex_string(t);
    if (c == '@') {
      std::size_t j = i_ + 1;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '-')) ++j;
      if (j == i_ + 1) fail("empty language tag", i_);
      t.kind = Tok::LangTag;
      t.text = std::string(s_.substr(i_ + 1, j - i_ - 1));
      i_ = j;
      return;
    }
    if (c == '^' && i_ + 1 < s_.size() && s_[i_ + 1] == '^') {
      t.kind = Tok::Carets;
      i_ += 2;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
      return lex_number(t);
    }
    if (c == '_' && i_ + 1 < s_.size() && s_[i_ + 1] == ':') {
      t.kind = Tok::Blank;
      i_ += 2;
      while (i_ < s_.size() && is_name_char(s_[i_])) ++i_;
      return;
    }
    if (is_name_start(c) || c == ':') {
      std::size_t j = i_;
      while (j < s_.size() && is_name_char(s_[j])) ++j;
      if (j < s_.size() && s_[j] == ':') {
        ++j;
        while (j < s_.size() && (is_name_char(s_[j]) || s_[j] == '.' || s_[j] == ':' || s_[j] == '%')) ++j;
        while (s_[j - 1] == '.') --j;
        t.kind = Tok::PName;
      } else {
        t.kind = Tok::Word;
      }
      t.text = std::string(s_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    static const char* two[] = {"!=", "<=", ">=", "&&", "||"};
    for (const char* op : two) {
      if (s_.substr(i_, 2) == op) {
        t.kind = Tok::Punct;
        t.text = op;
        i_ += 2;
        return;
      }
    }
    if (std::string_view("{}.;,()*=<>!/|^+-[]").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++i_;
      return;
    }
    fail(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  Query run() {
    Query q;
    prologue(q);
    select_clause(q);
    if (is_word("FROM")) unsupported("FROM");
    if (is_word("WHERE")) next();
    q.where = group(q);
    modifiers(q);
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    for (const auto& v : q.projection) {
      auto vars = q.where.variables();
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw QueryError("projected variable ?" + v + " does not occur in the pattern", 0);
    }
    return q;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (p_ < toks_.size() - 1) ++p_;
    return t;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw QueryError(what + " at position " + std::to_string(peek().pos), peek().pos);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedError("unsupported construct: " + what + " at position " + std::to_string(peek().pos),
                           peek().pos);
  }
  bool is_word(const char* w) const { return peek().kind == Tok::Word && upper(peek().text) == w; }
  bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  void expect_punct(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    next();
  }

  void prologue(Query& q) {
    for (;;) {
      if (is_word("PREFIX")) {
        next();
        if (peek().kind != Tok::PName || peek().text.back() != ':') fail("expected prefix name");
        std::string name = next().text;
        name.pop_back();
        if (peek().kind != Tok::Iri) fail("expected IRI");
        q.prefixes[name] = next().text;
      } else if (is_word("BASE")) {
        unsupported("BASE");
      } else {
        return;
      }
    }
  }

  void select_clause(Query& q) {
    for (const char* form : {"CONSTRUCT", "ASK", "DESCRIBE"})
      if (is_word(form)) unsupported(form);
    if (!is_word("SELECT")) fail("expected SELECT");
    next();
    if (is_word("DISTINCT")) {
      q.distinct = true;
      next();
    } else if (is_word("REDUCED")) {
      unsupported("REDUCED");
    }
    if (is_punct("*")) {
      next();
      q.select_all = true;
      return;
    }
    while (peek().kind == Tok::Var) q.projection.push_back(next().text);
    if (is_punct("(")) unsupported("select expression");
    if (q.projection.empty()) fail("expected projection");
  }

  GroupPattern group(Query& q) {
    expect_punct("{");
    GroupPattern g;
    for (;;) {
      if (is_punct("}")) {
        next();
        return g;
      }
      if (peek().kind == Tok::End) fail("unterminated group");
      if (is_punct(".")) {
        next();
        continue;
      }
      if (is_punct("{")) {
        PatternElement e;
        e.groups.push_back(group(q));
        if (is_word("UNION")) {
          e.kind = PatternElement::Kind::Union;
          while (is_word("UNION")) {
            next();
            e.groups.push_back(group(q));
          }
        } else {
          e.kind = PatternElement::Kind::Group;
        }
        g.elements.push_back(std::move(e));
        continue;
      }
      if (is_word("OPTIONAL")) {
        next();
        PatternElement e;
        e.kind = PatternElement::Kind::Optional;
        e.groups.push_back(group(q));
        g.elements.push_back(std::move(e));
        continue;
      }
      if (is_word("FILTER")) {
        next();
        PatternElement e;
        e.kind = PatternElement::Kind::Filter;
        if (is_punct("(")) {
          next();
          e.filter = expression(q);
          expect_punct(")");
        } else {
          e.filter = primary(q);
          if (e.filter.kind != Expr::Kind::Bound) fail("expected '(' after FILTER");
        }
        g.elements.push_back(std::move(e));
        continue;
      }
      for (const char* kw : {"MINUS", "GRAPH", "BIND", "VALUES", "SERVICE", "UNION"})
        if (is_word(kw)) unsupported(kw);
      triples_block(q, g);
    }
  }

  QueryTerm resolve_pname(const Query& q, const Token& t) const {
    auto colon = t.text.find(':');
    auto it = q.prefixes.find(t.text.substr(0, colon));
    if (it == q.prefixes.end())
      throw QueryError("undeclared prefix '" + t.text.substr(0, colon) + ":'", t.pos);
    return QueryTerm::constant(Term::iri(it->second + t.text.substr(colon + 1)));
  }

  QueryTerm term(const Query& q, bool allow_literal) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Var: next(); return QueryTerm::variable(t.text);
      case Tok::Iri: next(); return QueryTerm::constant(Term::iri(t.text));
      case Tok::PName: next(); return resolve_pname(q, t);
      case Tok::Blank: unsupported("blank node in pattern");
      case Tok::String: {
        if (!allow_literal) fail("literal not allowed here");
        std::string value = next().text;
        if (peek().kind == Tok::LangTag) return QueryTerm::constant(Term::literal(value, {}, next().text));
        if (peek().kind == Tok::Carets) {
          next();
          QueryTerm dt = term(q, false);
          if (dt.is_var) fail("datatype must be an IRI");
          return QueryTerm::constant(Term::literal(value, dt.term.lexical));
        }
        return QueryTerm::constant(Term::literal(value));
      }
      case Tok::Number: {
        if (!allow_literal) fail("literal not allowed here");
        next();
        return QueryTerm::constant(Term::literal(t.text, std::string(vocab::kXsd) + t.number_type));
      }
      case Tok::Word: {
        std::string w = upper(t.text);
        if (w == "TRUE" || w == "FALSE") {
          if (!allow_literal) fail("literal not allowed here");
          next();
          return QueryTerm::constant(Term::literal(w == "TRUE" ? "true" : "false", std::string(vocab::kXsd) + "boolean"));
        }
        fail("unexpected '" + t.text + "'");
      }
      case Tok::Punct:
        if (t.text == "[" || t.text == "(") unsupported(t.text == "[" ? "blank node property list" : "collection");
        fail("unexpected '" + t.text + "'");
      default: fail("expected a term");
    }
  }

  QueryTerm verb(const Query& q) {
    if (peek().kind == Tok::Word && peek().text == "a") {
      next();
      return QueryTerm::constant(Term::iri(std::string(vocab::kRdfType)));
    }
    QueryTerm v = term(q, false);
    if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+") || is_punct("^"))
      unsupported("property path");
    return v;
  }

  void triples_block(Query& q, GroupPattern& g) {
    if (is_punct("^")) unsupported("property path");
    QueryTerm s = term(q, true);
    for (;;) {
      QueryTerm p = verb(q);
      for (;;) {
        QueryTerm o = term(q, true);
        PatternElement e;
        e.kind = PatternElement::Kind::Triple;
        e.triple = {s, p, o};
        g.elements.push_back(std::move(e));
        if (!is_punct(",")) break;
        next();
      }
      if (!is_punct(";")) break;
      next();
      while (is_punct(";")) next();
      if (is_punct(".") || is_punct("}")) break;
    }
    if (is_punct(".")) next();
    else if (!is_punct("}") && !is_punct("{") && !is_word("OPTIONAL") && !is_word("FILTER") && !is_word("MINUS") &&
             !is_word("BIND") && !is_word("VALUES") && !is_word("GRAPH") && !is_word("SERVICE"))
      fail("expected '.' or '}'");
  }

  Expr expression(const Query& q) {
    Expr left = conjunction(q);
    if (!is_punct("||")) return left;
    Expr e;
    e.kind = Expr::Kind::Or;
    e.args.push_back(std::move(left));
    while (is_punct("||")) {
      next();
      e.args.push_back(conjunction(q));
    }
    return e;
  }

  Expr conjunction(const Query& q) {
    Expr left = unary(q);
    if (!is_punct("&&")) return left;
    Expr e;
    e.kind = Expr::Kind::And;
    e.args.push_back(std::move(left));
    while (is_punct("&&")) {
      next();
      e.args.push_back(unary(q));
    }
    return e;
  }

  Expr unary(const Query& q) {
    if (is_punct("!")) {
      next();
      Expr e;
      e.kind = Expr::Kind::Not;
      e.args.push_back(unary(q));
      return e;
    }
    Expr left = primary(q);
    static const std::pair<const char*, CompareOp> ops[] = {{"=", CompareOp::Eq},  {"!=", CompareOp::Ne},
                                                            {"<", CompareOp::Lt},  {"<=", CompareOp::Le},
                                                            {">", CompareOp::Gt},  {">=", CompareOp::Ge}};
    for (const auto& [text, op] : ops) {
      if (is_punct(text)) {
        next();
        Expr e;
        e.kind = Expr::Kind::Compare;
        e.op = op;
        e.args.push_back(std::move(left));
        e.args.push_back(primary(q));
        if (is_punct("+") || is_punct("-") || is_punct("*") || is_punct("/")) unsupported("arithmetic");
        return e;
      }
    }
    if (is_punct("+") || is_punct("-") || is_punct("*") || is_punct("/")) unsupported("arithmetic");
    return left;
  }

  Expr primary(const Query& q) {
    if (is_punct("(")) {
      next();
      Expr e = expression(q);
      expect_punct(")");
      return e;
    }
    if (peek().kind == Tok::Word && (peek(1).kind == Tok::Punct && peek(1).text == "(")) {
      std::string name = upper(peek().text);
      if (name != "BOUND") unsupported("function " + peek().text);
      next();
      next();
      if (peek().kind != Tok::Var) fail("BOUND expects a variable");
      Expr e;
      e.kind = Expr::Kind::Bound;
      e.value = QueryTerm::variable(next().text);
      expect_punct(")");
      return e;
    }
    if (peek().kind == Tok::PName && peek(1).kind == Tok::Punct && peek(1).text == "(") unsupported("function call");
    Expr e;
    e.kind = Expr::Kind::Value;
    e.value = term(q, true);
    return e;
  }

  std::uint64_t count_value() {
    if (peek().kind != Tok::Number || peek().number_type != "integer" || peek().text[0] == '-' || peek().text[0] == '+')
      fail("expected a non-negative integer");
    std::uint64_t v = 0;
    const std::string& s = peek().text;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("integer out of range");
    next();
    return v;
  }

  void modifiers(Query& q) {
    if (is_word("GROUP") || is_word("HAVING")) unsupported(upper(peek().text));
    if (is_word("ORDER")) {
      next();
      if (!is_word("BY")) fail("expected BY");
      next();
      for (;;) {
        if (peek().kind == Tok::Var) {
          q.order_by.push_back({next().text, false});
        } else if (is_word("ASC") || is_word("DESC")) {
          bool desc = is_word("DESC");
          next();
          expect_punct("(");
          if (peek().kind != Tok::Var) unsupported("ORDER BY expression");
          q.order_by.push_back({next().text, desc});
          expect_punct(")");
        } else {
          break;
        }
      }
      if (q.order_by.empty()) fail("expected ORDER BY key");
    }
    bool seen_limit = false, seen_offset = false;
    for (;;) {
      if (is_word("LIMIT") && !seen_limit) {
        next();
        q.limit = count_value();
        seen_limit = true;
      } else if (is_word("OFFSET") && !seen_offset) {
        next();
        q.offset = count_value();
        seen_offset = true;
      } else {
        break;
      }
    }
    if (q.limit && q.offset > std::numeric_limits<std::uint64_t>::max() - *q.limit)
      throw QueryError("LIMIT/OFFSET overflow", peek().pos);
  }

  std::vector<Token> toks_;
  std::size_t p_ = 0;
};

void collect_variables(const GroupPattern& g, std::vector<std::string>& out) {
  auto add = [&](const QueryTerm& t) {
    if (t.is_var && std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
  };
  for (const auto& e : g.elements) {
    if (e.kind == PatternElement::Kind::Triple) {
      add(e.triple.s);
      add(e.triple.p);
      add(e.triple.o);
    }
    for (const auto& sub : e.groups) collect_variables(sub, out);
  }
}

std::size_t count_triples(const GroupPattern& g) {
  std::size_t n = 0;
  for (const auto& e : g.elements) {
    if (e.kind == PatternElement::Kind::Triple) ++n;
    for (const auto& sub : e.groups) n += count_triples(sub);
  }
  return n;
}

}  // namespace

void Expr::variables(std::vector<std::string>& out) const {
  if ((kind == Kind::Value || kind == Kind::Bound) && value.is_var) {
    if (std::find(out.begin(), out.end(), value.var) == out.end()) out.push_back(value.var);
  }
  for (const auto& a : args) a.variables(out);
}

std::vector<std::string> GroupPattern::variables() const {
  std::vector<std::string> out;
  collect_variables(*this, out);
  return out;
}

std::vector<std::string> Query::output_variables() const { return select_all ? where.variables() : projection; }

std::size_t Query::triple_count() const { return count_triples(where); }

Query parse_sparql(std::string_view text) { return Parser(text).run(); }

}  // namespace wfwl
