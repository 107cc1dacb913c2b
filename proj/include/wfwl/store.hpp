#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wfwl/bit_vector.hpp"
#include "wfwl/code_tree.hpp"
#include "wfwl/prefix_code.hpp"
#include "wfwl/wavelet_tree.hpp"

namespace wfwl {

class ByteWriter;
class ByteReader;

/// A triple in store form. The object is a concept self code exactly when the
/// predicate is rdf:type, and an instance id otherwise.
struct EncodedTriple {
  std::uint32_t s = 0;
  PrefixCode p;
  bool is_concept = false;
  PrefixCode oc;        ///< concept object
  std::uint32_t oi = 0;  ///< instance object

  friend bool operator==(const EncodedTriple&, const EncodedTriple&) = default;
  /// Subject, then predicate and concept codes as sentinel integers (so
  /// rdf:type leads and shorter codes sort first), then instance object.
  friend std::strong_ordering operator<=>(const EncodedTriple& a, const EncodedTriple& b) {
    if (auto c = a.s <=> b.s; c != 0) return c;
    if (auto c = a.p.to_sentinel() <=> b.p.to_sentinel(); c != 0) return c;
    if (auto c = a.is_concept <=> b.is_concept; c != 0) return c;
    if (auto c = a.oc.to_sentinel() <=> b.oc.to_sentinel(); c != 0) return c;
    return a.oi <=> b.oi;
  }
};

/// Object slot of a pattern: unbound, an instance id, or a concept prefix.
struct ObjectSlot {
  enum class Kind : std::uint8_t { Any, Instance, Concept };
  Kind kind = Kind::Any;
  std::uint32_t id = 0;
  PrefixCode prefix;

  static ObjectSlot any() { return {}; }
  static ObjectSlot instance(std::uint32_t id) { return {Kind::Instance, id, {}}; }
  static ObjectSlot concept_prefix(PrefixCode prefix) { return {Kind::Concept, 0, prefix}; }
};

/// (S|*, P-prefix|*, O|C-prefix|*). A predicate prefix matches every property
/// code it prefixes; an exact self code matches that property alone.
struct TriplePattern {
  std::optional<std::uint32_t> s;
  std::optional<PrefixCode> p;
  ObjectSlot o;
};

class TripleStore;

/// Lazy iterator over the triples matching a pattern, in store order.
class Cursor {
 public:
  /// Writes the next match into `out`; false when exhausted.
  bool next(EncodedTriple& out);

 private:
  friend class TripleStore;
  enum class Route : std::uint8_t { Empty, Nodes, PredicateSelect, InstanceSelect, ConceptSelect };

  bool matches_object(std::uint64_t g) const;
  void emit(std::uint64_t node, std::uint64_t g, EncodedTriple& out) const;

  const TripleStore* store_ = nullptr;
  TriplePattern pattern_;
  Route route_ = Route::Empty;
  // Node routes: current predicate node and its object range.
  std::uint64_t node_ = 0, node_end_ = 0;
  std::uint64_t obj_ = 0, obj_end_ = 0;
  bool in_node_ = false;
  // Select routes: next ordinal (1-based) and how many there are.
  std::uint64_t ordinal_ = 1, ordinal_end_ = 0;
  PrefixCode select_code_;
  std::uint64_t subject_ordinal_ = 0;
};

/// Two-layer succinct triple index: B_p / WT_p link subjects to predicate
/// nodes, B_o / B_c / WT_oc / WT_oi link predicate nodes to objects. An
/// extra bitvector over the id space maps subject ordinals to instance ids.
class TripleStore {
 public:
  TripleStore();

  /// `triples` must be strictly increasing. Throws BuildError otherwise.
  static TripleStore build(std::span<const EncodedTriple> triples, const CodeTree& property_tree,
                           const CodeTree& concept_tree, std::uint32_t n_instances, PrefixCode type_code);

  std::uint64_t n_triples() const { return b_o_.size(); }
  std::uint64_t n_subjects() const { return b_p_.count(true); }
  std::uint64_t n_predicate_nodes() const { return b_p_.size(); }
  std::uint32_t n_instances() const { return n_instances_; }
  unsigned id_width() const { return id_width_; }
  PrefixCode type_code() const { return type_code_; }

  const BitVector& b_p() const { return b_p_; }
  const BitVector& b_o() const { return b_o_; }
  const BitVector& b_c() const { return b_c_; }
  const BitVector& subjects() const { return subjects_; }
  const WaveletTree& wt_p() const { return wt_p_; }
  const WaveletTree& wt_oc() const { return wt_oc_; }
  const WaveletTree& wt_oi() const { return wt_oi_; }

  /// Throws QueryError for ill-typed patterns (concept object with a
  /// predicate that is not rdf:type).
  Cursor resolve(const TriplePattern& pattern) const;
  std::uint64_t count(const TriplePattern& pattern) const;
  /// Every triple in store order.
  std::vector<EncodedTriple> triples() const;

  /// Throws BuildError when a structural invariant fails.
  void check_invariants() const;

  // Each layer is a separate container section.
  void serialize_meta(ByteWriter& out) const;
  void serialize_layer(int layer, ByteWriter& out) const;
  static constexpr int kLayerCount = 7;  // B_p, WT_p, B_o, B_c, WT_oc, WT_oi, subjects
  static TripleStore deserialize(ByteReader& meta, std::span<ByteReader> layers);

  friend bool operator==(const TripleStore&, const TripleStore&) = default;

 private:
  friend class Cursor;

  // Navigation helpers (0-based positions and ordinals).
  std::uint64_t node_begin(std::uint64_t subject_ordinal) const;
  std::uint64_t node_end(std::uint64_t subject_ordinal) const;
  std::uint64_t object_begin(std::uint64_t node) const;
  std::uint64_t object_end(std::uint64_t node) const;
  std::uint64_t node_of_object(std::uint64_t g) const { return b_o_.rank1(g + 1) - 1; }
  std::uint64_t subject_of_node(std::uint64_t node) const { return b_p_.rank1(node + 1) - 1; }
  std::uint32_t subject_id(std::uint64_t ordinal) const {
    return static_cast<std::uint32_t>(subjects_.select1(ordinal + 1));
  }
  std::optional<std::uint64_t> subject_ordinal(std::uint32_t id) const;
  PrefixCode instance_code(std::uint32_t id) const { return PrefixCode(id, id_width_); }
  void validate(const TriplePattern& pattern) const;

  BitVector b_p_;
  WaveletTree wt_p_;
  BitVector b_o_;
  BitVector b_c_;
  WaveletTree wt_oc_;
  WaveletTree wt_oi_;
  BitVector subjects_;
  std::uint32_t n_instances_ = 0;
  unsigned id_width_ = 1;
  PrefixCode type_code_;
};

}  // namespace wfwl
