#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfwl/ntriples.hpp"
#include "wfwl/ontology.hpp"
#include "wfwl/store.hpp"

namespace wfwl {

/// True for subClassOf/subPropertyOf/domain/range triples and for type
/// declarations of classes and properties.
bool is_schema_triple(const RawTriple& t);

struct SplitResult {
  std::vector<RawTriple> tbox;
  std::vector<RawTriple> abox;
};

SplitResult split_tbox_abox(std::vector<RawTriple> triples);

/// Concepts named as rdf:type objects and predicates used in the data, for
/// Ontology::classify. Throws IngestError on a literal rdf:type object.
struct DataVocabulary {
  std::vector<std::string> concepts;
  std::vector<std::string> properties;
};
DataVocabulary data_vocabulary(const std::vector<RawTriple>& abox);

/// Removes rdf:type triples naming owl:Thing or rdfs:Resource, which every
/// resource satisfies. Returns how many were removed.
std::size_t drop_top_typings(std::vector<RawTriple>& abox);

struct MaterializeOptions {
  bool drop_superseded = true;  ///< remove types made redundant by a deeper one
};

struct MaterializeReport {
  std::size_t added = 0;
  std::size_t removed = 0;
};

/// Types subjects and objects by the effective domains and ranges of the
/// properties they occur with, keeping only the deepest known types. Added
/// triples are appended; removed ones are erased in place. Throws IngestError
/// if a typing names a concept the ontology does not know.
MaterializeReport materialize_domain_range(std::vector<RawTriple>& abox, const Ontology& ontology,
                                           const MaterializeOptions& options = {});

/// Instance-level terms in first-occurrence order (subjects, and objects of
/// every predicate but rdf:type).
std::vector<Term> instance_terms(const std::vector<RawTriple>& abox);

/// Encodes, sorts by (subject, predicate code, object) and deduplicates.
/// Throws IngestError for terms missing from the dictionaries.
std::vector<EncodedTriple> encode_and_sort(const std::vector<RawTriple>& abox,
                                           const std::unordered_map<std::string, std::uint32_t>& ids,
                                           const Ontology& ontology);

}  // namespace wfwl
