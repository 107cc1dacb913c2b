#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace wfwl {

enum class TermKind : std::uint8_t { Iri = 0, BlankNode = 1, Literal = 2 };

/// An RDF term. `lexical` is the IRI text, blank node label, or literal value
/// (unescaped). At most one of datatype/lang is set, and only on literals.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::string datatype;
  std::string lang;

  static Term iri(std::string value) { return Term{TermKind::Iri, std::move(value), {}, {}}; }
  static Term blank(std::string label) { return Term{TermKind::BlankNode, std::move(label), {}, {}}; }
  static Term literal(std::string value, std::string datatype = {}, std::string lang = {}) {
    return Term{TermKind::Literal, std::move(value), std::move(datatype), std::move(lang)};
  }

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_resource() const { return kind != TermKind::Literal; }

  /// Canonical N-Triples rendering.
  std::string to_ntriples() const;
  /// Parses exactly one term in N-Triples syntax. Throws ParseError (line 0).
  static Term from_ntriples(std::string_view text);

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

}  // namespace wfwl
