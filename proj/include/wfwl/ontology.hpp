#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wfwl/code_tree.hpp"
#include "wfwl/ntriples.hpp"
#include "wfwl/prefix_code.hpp"

namespace wfwl {

class ByteWriter;
class ByteReader;

enum class PropertyClass : std::uint8_t { None = 0, Type = 1, Datatype = 2, Object = 3 };

/// One node of a concept or property hierarchy. Synthetic nodes (the property
/// root and the datatype/object class nodes) have no IRI.
struct OntologyNode {
  std::string iri;
  std::vector<std::string> aliases;  ///< equivalent IRIs collapsed into this node
  std::int32_t parent = -1;          ///< primary parent; -1 only for the root
  std::vector<std::int32_t> other_parents;
  std::vector<std::int32_t> children;  ///< primary children, by code
  PrefixCode code;       ///< covers the node and everything below it
  PrefixCode self_code;  ///< the node alone (== code for leaves)
  std::uint8_t local_width = 0;
  std::vector<PrefixCode> alternate_codes;  ///< positions under other_parents
  PropertyClass property_class = PropertyClass::None;
  std::vector<std::int32_t> domains;  ///< concept node ids (properties only)
  std::vector<std::int32_t> ranges;

  bool synthetic() const { return iri.empty(); }
};

/// A tree-shaped, prefix-coded view of one hierarchy (concepts or
/// properties). Node 0 is the root: owl:Thing for concepts, an anonymous top
/// for properties whose children are rdf:type (00) and the datatype (01) and
/// object (10) property classes.
class Hierarchy {
 public:
  static constexpr std::int32_t kNone = -1;

  std::size_t size() const { return nodes_.size(); }
  const OntologyNode& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::span<const OntologyNode> nodes() const { return nodes_; }

  /// Node named by `iri` (aliases included), or kNone.
  std::int32_t find(std::string_view iri) const;
  /// Node whose code or self code equals `code`, or kNone.
  std::int32_t find_code(const PrefixCode& code) const;

  /// Prefix covering the node and all its primary descendants.
  PrefixCode strip_self(std::int32_t id) const { return node(id).code; }
  /// Alternate codes of the element stored under `code`.
  std::vector<PrefixCode> equivalents(const PrefixCode& code) const;
  /// Disjoint prefixes covering everything subsumed by `id`, following
  /// multiple-inheritance alternates. The first entry is the node's own code.
  const std::vector<PrefixCode>& expansion(std::int32_t id) const { return expansions_[id]; }
  /// Non-synthetic ancestors in the full DAG, including `id`, excluding the root.
  const std::vector<std::int32_t>& ancestors(std::int32_t id) const { return ancestors_[id]; }
  /// True when `sub` is subsumed by (or equal to) `super` in the DAG.
  bool subsumes(std::int32_t super, std::int32_t sub) const;

  /// True for nodes that appear as data symbols (everything but the root and
  /// synthetic class nodes).
  bool is_element(std::int32_t id) const { return id != 0 && !node(id).synthetic(); }

  /// Code tree whose leaves are the self codes of every element (symbol = node id).
  CodeTree leaf_tree() const;

  void serialize(ByteWriter& out) const;
  static Hierarchy deserialize(ByteReader& in, bool properties);

  friend bool operator==(const Hierarchy& a, const Hierarchy& b);

 private:
  friend class Ontology;
  void finalize();  // indexes, ancestors and expansions from nodes_

  bool properties_ = false;
  std::vector<OntologyNode> nodes_;
  std::unordered_map<std::string, std::int32_t> by_iri_;
  std::unordered_map<std::uint64_t, std::int32_t> by_code_;
  std::vector<std::vector<std::int32_t>> ancestors_;
  std::vector<std::vector<PrefixCode>> expansions_;
};

/// Concept and property dictionaries derived from the TBox.
class Ontology {
 public:
  /// Classifies the schema triples. Concepts and properties that only occur
  /// in the data (`data_concepts`, `data_properties`) are added as roots /
  /// undeclared object properties. Subclass cycles collapse into one node
  /// named by the least IRI.
  static Ontology classify(std::span<const RawTriple> tbox, std::span<const std::string> data_concepts = {},
                           std::span<const std::string> data_properties = {});

  const Hierarchy& concepts() const { return concepts_; }
  const Hierarchy& properties() const { return properties_; }

  std::int32_t type_property() const { return type_property_; }
  static PrefixCode type_code() { return PrefixCode(0, 2); }

  /// Domains/ranges of `property` and of every super-property.
  std::vector<std::int32_t> effective_domains(std::int32_t property) const;
  std::vector<std::int32_t> effective_ranges(std::int32_t property) const;

  void serialize_concepts(ByteWriter& out) const { concepts_.serialize(out); }
  void serialize_properties(ByteWriter& out) const { properties_.serialize(out); }
  void serialize_equivalences(ByteWriter& out) const;
  static Ontology deserialize(ByteReader& concepts, ByteReader& properties, ByteReader& equivalences);

  friend bool operator==(const Ontology& a, const Ontology& b) {
    return a.concepts_ == b.concepts_ && a.properties_ == b.properties_;
  }

 private:
  Hierarchy concepts_;
  Hierarchy properties_;
  std::int32_t type_property_ = Hierarchy::kNone;
};

}  // namespace wfwl
