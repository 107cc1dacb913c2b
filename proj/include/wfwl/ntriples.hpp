#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "wfwl/term.hpp"

namespace wfwl {

struct RawTriple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const RawTriple&, const RawTriple&) = default;
  friend auto operator<=>(const RawTriple&, const RawTriple&) = default;
};

/// Strict line-oriented N-Triples reader. Blank nodes are replaced by IRIs
/// under vocab::kGenIdPrefix + scope + ":" so that labels from different
/// files never collide. Throws ParseError carrying the 1-based line number.
std::vector<RawTriple> parse_ntriples(std::istream& in, std::string_view skolem_scope = "g");
std::vector<RawTriple> parse_ntriples(std::string_view text, std::string_view skolem_scope = "g");
std::vector<RawTriple> parse_ntriples_file(const std::string& path, std::string_view skolem_scope = "g");

std::string to_ntriples(const RawTriple& t);

}  // namespace wfwl
