#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wfwl/term.hpp"

namespace wfwl {

class ByteWriter;
class ByteReader;

enum class DictPolicy : std::uint8_t {
  Sorted = 0,     ///< ids follow the lexicographic order of the canonical form
  FirstSeen = 1,  ///< ids follow first occurrence in the input
};

std::string_view to_string(DictPolicy p);
DictPolicy dict_policy_from_string(std::string_view s);

/// Bijection between instance-level terms and ids 1..N (0 means "absent").
///
/// Terms are kept as canonical N-Triples strings, front-coded in blocks of 16
/// consecutive ids. Lookup by term binary-searches the blocks under the
/// sorted policy and a sorted id permutation under first_seen.
class InstanceDictionary {
 public:
  static constexpr std::uint32_t kAbsent = 0;
  static constexpr std::size_t kBlockSize = 16;

  struct Built;

  InstanceDictionary() = default;

  /// Duplicate terms collapse to one id.
  static Built build(std::span<const Term> terms, DictPolicy policy);

  std::size_t size() const { return count_; }
  DictPolicy policy() const { return policy_; }

  /// Id of `t`, or kAbsent.
  std::uint32_t encode(const Term& t) const { return encode_canonical(t.to_ntriples()); }
  std::uint32_t encode_canonical(std::string_view canonical) const;
  /// Throws RangeError unless 1 <= id <= size().
  Term decode(std::uint32_t id) const;
  std::string decode_canonical(std::uint32_t id) const;

  std::size_t size_in_bytes() const { return data_.size() + block_offsets_.size() * 4 + order_.size() * 4; }

  void serialize(ByteWriter& out) const;
  static InstanceDictionary deserialize(ByteReader& in);

  friend bool operator==(const InstanceDictionary& a, const InstanceDictionary& b) {
    return a.policy_ == b.policy_ && a.count_ == b.count_ && a.data_ == b.data_;
  }

 private:
  void index_blocks();
  void build_order();
  int compare_id(std::uint32_t id, std::string_view key) const;

  DictPolicy policy_ = DictPolicy::Sorted;
  std::size_t count_ = 0;
  std::string data_;                          // front-coded blocks
  std::vector<std::uint32_t> block_offsets_;  // start of each block in data_
  std::vector<std::uint32_t> order_;          // first_seen only: ids in canonical order
};

struct InstanceDictionary::Built {
  InstanceDictionary dictionary;
  /// canonical form -> id, for bulk encoding during ingest.
  std::unordered_map<std::string, std::uint32_t> ids;
};

/// Occurrence counts gathered at build time, used for semantic checking and
/// plan ordering.
struct DatasetStats {
  std::uint64_t n_triples = 0;
  std::uint64_t n_subjects = 0;
  std::uint64_t n_objects = 0;     ///< distinct object values (instances and concepts)
  std::uint64_t n_predicates = 0;  ///< distinct predicates
  std::uint64_t n_type_triples = 0;
  std::uint64_t n_materialized = 0;  ///< type triples added by domain/range typing
  std::uint64_t n_superseded = 0;    ///< type triples removed as less specific

  std::vector<std::uint32_t> subject_occ;  ///< indexed by instance id (0 unused)
  std::vector<std::uint32_t> object_occ;   ///< instance-object occurrences, by id
  std::vector<std::uint64_t> concept_direct;    ///< type triples naming exactly this concept
  std::vector<std::uint64_t> concept_entailed;  ///< type triples under the concept (incl. alternates)
  std::vector<std::uint64_t> property_direct;
  std::vector<std::uint64_t> property_entailed;

  struct InstanceCounts {
    std::uint64_t as_subject = 0;
    std::uint64_t as_object = 0;
  };
  InstanceCounts instance(std::uint32_t id) const;

  void serialize(ByteWriter& out) const;
  static DatasetStats deserialize(ByteReader& in);

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

}  // namespace wfwl
