#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfwl/database.hpp"
#include "wfwl/sparql.hpp"

namespace wfwl {

enum class Entailment : std::uint8_t { Simple, Rdfs };

std::string_view to_string(Entailment e);
Entailment entailment_from_string(std::string_view s);

/// Counters filled in while a query runs.
struct ExecStats {
  bool unsatisfiable = false;       ///< rejected by the dictionary check
  std::uint64_t store_probes = 0;   ///< resolve calls issued against the store
  std::uint64_t intermediate_rows = 0;
  std::vector<std::string> plan;    ///< top-level patterns in execution order
};

struct ResultTable {
  std::vector<std::string> variables;
  std::vector<std::vector<std::optional<Term>>> rows;
};

/// Evaluates parsed queries against a database. Under rdfs entailment,
/// concepts and properties stand for themselves and everything below them,
/// including multiple-inheritance alternates; variables in predicate and
/// rdf:type object position range over every super-element of the stored
/// value.
class QueryEngine {
 public:
  explicit QueryEngine(const Database& db);

  ResultTable execute(const Query& query, Entailment entailment = Entailment::Rdfs, ExecStats* stats = nullptr) const;
  ResultTable execute(std::string_view sparql, Entailment entailment = Entailment::Rdfs,
                      ExecStats* stats = nullptr) const;

  const Database& database() const { return db_; }

  /// When off, patterns run in query text order instead of the planned order.
  void set_reordering(bool on) { reorder_ = on; }

 private:
  friend class Evaluator;
  const Database& db_;
  bool reorder_ = true;
  // Canonical value of each hierarchy node: the instance id when the IRI is
  // also an instance term.
  std::vector<std::uint64_t> concept_values_;
  std::vector<std::uint64_t> property_values_;
};

std::string format_tsv(const ResultTable& table);
std::string format_json(const ResultTable& table);

}  // namespace wfwl
