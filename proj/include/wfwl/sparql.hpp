#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfwl/term.hpp"

namespace wfwl {

/// A pattern slot or expression operand: a variable or a constant term.
struct QueryTerm {
  bool is_var = false;
  std::string var;  ///< without the leading '?'
  Term term;

  static QueryTerm variable(std::string name) { return {true, std::move(name), {}}; }
  static QueryTerm constant(Term t) { return {false, {}, std::move(t)}; }
  friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

struct PatternTriple {
  QueryTerm s, p, o;
  friend bool operator==(const PatternTriple&, const PatternTriple&) = default;
};

enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr {
  enum class Kind : std::uint8_t { Or, And, Not, Compare, Bound, Value };
  Kind kind = Kind::Value;
  CompareOp op = CompareOp::Eq;
  std::vector<Expr> args;
  QueryTerm value;  ///< Value and Bound

  void variables(std::vector<std::string>& out) const;
};

struct GroupPattern;

struct PatternElement {
  enum class Kind : std::uint8_t { Triple, Group, Union, Optional, Filter };
  Kind kind = Kind::Triple;
  PatternTriple triple;
  std::vector<GroupPattern> groups;  ///< one for Group/Optional, the branches for Union
  Expr filter;
};

struct GroupPattern {
  std::vector<PatternElement> elements;

  /// Variables in order of first occurrence (triples only, nested included).
  std::vector<std::string> variables() const;
};

struct OrderKey {
  std::string var;
  bool descending = false;
};

struct Query {
  std::map<std::string, std::string> prefixes;
  bool distinct = false;
  bool select_all = false;
  std::vector<std::string> projection;
  GroupPattern where;
  std::vector<OrderKey> order_by;
  std::optional<std::uint64_t> limit;
  std::uint64_t offset = 0;

  /// Projected variables (the pattern's variables for SELECT *).
  std::vector<std::string> output_variables() const;
  /// Number of triple patterns, nested ones included.
  std::size_t triple_count() const;
};

/// Parses the supported SPARQL subset. Throws QueryError (with the byte
/// position) on syntax errors and UnsupportedError for constructs outside
/// the subset.
Query parse_sparql(std::string_view text);

}  // namespace wfwl
