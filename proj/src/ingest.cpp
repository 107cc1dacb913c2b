#include "wfwl/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include "wfwl/error.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

bool is_declaration_class(std::string_view o) {
  return o == vocab::kOwlClass || o == vocab::kRdfsClass || o == vocab::kRdfProperty ||
         o == vocab::kOwlObjectProperty || o == vocab::kOwlDatatypeProperty;
}

bool is_type(const RawTriple& t) { return t.predicate.lexical == vocab::kRdfType; }

}  // namespace

bool is_schema_triple(const RawTriple& t) {
  const std::string& p = t.predicate.lexical;
  if (p == vocab::kRdfsSubClassOf || p == vocab::kRdfsSubPropertyOf || p == vocab::kRdfsDomain ||
      p == vocab::kRdfsRange)
    return true;
  return p == vocab::kRdfType && t.object.is_iri() && is_declaration_class(t.object.lexical);
}

SplitResult split_tbox_abox(std::vector<RawTriple> triples) {
  SplitResult out;
  for (auto& t : triples) (is_schema_triple(t) ? out.tbox : out.abox).push_back(std::move(t));
  return out;
}

DataVocabulary data_vocabulary(const std::vector<RawTriple>& abox) {
  std::set<std::string> concepts, properties;
  for (const auto& t : abox) {
    if (is_type(t)) {
      if (t.object.is_literal()) throw IngestError("rdf:type object is a literal: " + to_ntriples(t));
      concepts.insert(t.object.lexical);
    } else {
      properties.insert(t.predicate.lexical);
    }
  }
  return {{concepts.begin(), concepts.end()}, {properties.begin(), properties.end()}};
}

std::size_t drop_top_typings(std::vector<RawTriple>& abox) {
  auto before = abox.size();
  std::erase_if(abox, [](const RawTriple& t) {
    return is_type(t) && (t.object.lexical == vocab::kOwlThing || t.object.lexical == vocab::kRdfsResource);
  });
  return before - abox.size();
}

MaterializeReport materialize_domain_range(std::vector<RawTriple>& abox, const Ontology& ontology,
                                           const MaterializeOptions& options) {
  const Hierarchy& concepts = ontology.concepts();
  const Hierarchy& properties = ontology.properties();

  // Known types per resource (canonical form), as concept node ids.
  std::unordered_map<std::string, std::set<std::int32_t>> types;
  std::unordered_map<std::string, Term> resources;
  std::set<std::pair<std::string, std::int32_t>> original;
  for (const auto& t : abox) {
    if (!is_type(t)) continue;
    auto c = concepts.find(t.object.lexical);
    if (c == Hierarchy::kNone) throw IngestError("unknown concept: " + t.object.lexical);
    std::string key = t.subject.to_ntriples();
    types[key].insert(c);
    original.emplace(key, c);
    resources.emplace(key, t.subject);
  }

  // Typing obligations, in sorted triple order.
  struct Obligation {
    std::string key;
    const Term* term;
    std::vector<std::int32_t> concepts;
  };
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < abox.size(); ++i)
    if (!is_type(abox[i])) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abox[a] < abox[b]; });
  std::vector<Obligation> obligations;
  for (auto i : order) {
    const RawTriple& t = abox[i];
    auto p = properties.find(t.predicate.lexical);
    if (p == Hierarchy::kNone) continue;
    auto domains = ontology.effective_domains(p);
    if (!domains.empty()) obligations.push_back({t.subject.to_ntriples(), &t.subject, std::move(domains)});
    if (t.object.is_resource()) {
      auto ranges = ontology.effective_ranges(p);
      if (!ranges.empty()) obligations.push_back({t.object.to_ntriples(), &t.object, std::move(ranges)});
    }
  }

  auto assert_type = [&](const std::string& key, std::int32_t d) {
    auto& known = types[key];
    for (auto c : known)
      if (concepts.subsumes(d, c)) return false;
    if (options.drop_superseded)
      std::erase_if(known, [&](std::int32_t c) { return concepts.subsumes(c, d); });
    known.insert(d);
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& ob : obligations) {
      for (auto d : ob.concepts) {
        if (assert_type(ob.key, d)) {
          changed = true;
          resources.emplace(ob.key, *ob.term);
        }
      }
    }
  }

  MaterializeReport report;
  std::erase_if(abox, [&](const RawTriple& t) {
    if (!is_type(t)) return false;
    auto key = t.subject.to_ntriples();
    bool gone = !types[key].count(concepts.find(t.object.lexical));
    report.removed += gone;
    return gone;
  });
  std::vector<std::pair<std::string, std::int32_t>> added;
  for (const auto& [key, set] : types)
    for (auto c : set)
      if (!original.count({key, c})) added.emplace_back(key, c);
  std::sort(added.begin(), added.end());
  for (const auto& [key, c] : added)
    abox.push_back(RawTriple{resources.at(key), Term::iri(std::string(vocab::kRdfType)), Term::iri(concepts.node(c).iri)});
  report.added = added.size();
  return report;
}

std::vector<Term> instance_terms(const std::vector<RawTriple>& abox) {
  std::vector<Term> out;
  out.reserve(abox.size() * 2);
  for (const auto& t : abox) {
    out.push_back(t.subject);
    if (!is_type(t)) out.push_back(t.object);
  }
  return out;
}

std::vector<EncodedTriple> encode_and_sort(const std::vector<RawTriple>& abox,
                                           const std::unordered_map<std::string, std::uint32_t>& ids,
                                           const Ontology& ontology) {
  const Hierarchy& concepts = ontology.concepts();
  const Hierarchy& properties = ontology.properties();
  auto instance_id = [&](const Term& term) {
    auto it = ids.find(term.to_ntriples());
    if (it == ids.end()) throw IngestError("term missing from the dictionary: " + term.to_ntriples());
    return it->second;
  };
  std::vector<EncodedTriple> out;
  out.reserve(abox.size());
  for (const auto& t : abox) {
    EncodedTriple e;
    e.s = instance_id(t.subject);
    auto p = properties.find(t.predicate.lexical);
    if (p == Hierarchy::kNone || !properties.is_element(p))
      throw IngestError("property missing from the ontology: " + t.predicate.lexical);
    e.p = properties.node(p).self_code;
    if (is_type(t)) {
      auto c = concepts.find(t.object.lexical);
      if (c == Hierarchy::kNone || !concepts.is_element(c))
        throw IngestError("concept missing from the ontology: " + t.object.lexical);
      e.is_concept = true;
      e.oc = concepts.node(c).self_code;
    } else {
      e.oi = instance_id(t.object);
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace wfwl
