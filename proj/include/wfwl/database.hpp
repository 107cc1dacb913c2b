#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wfwl/dictionary.hpp"
#include "wfwl/ntriples.hpp"
#include "wfwl/ontology.hpp"
#include "wfwl/store.hpp"

namespace wfwl {

struct BuildOptions {
  DictPolicy policy = DictPolicy::Sorted;
  bool materialize = true;
  bool drop_superseded = true;
};

struct BuildReport {
  std::size_t input_triples = 0;
  std::size_t tbox_triples = 0;
  std::size_t ignored_tbox_triples = 0;  ///< non-schema statements in the TBox input
  std::size_t abox_triples = 0;
  std::size_t dropped_top_typings = 0;
  std::size_t materialized = 0;
  std::size_t superseded = 0;
  std::size_t stored_triples = 0;
};

/// Dictionary, ontology, statistics and triple store, plus the "WFWL"
/// container that holds them.
class Database {
 public:
  static constexpr std::uint16_t kFormatVersion = 1;

  enum SectionId : std::uint16_t {
    kDictionary = 1,
    kConceptTree = 2,
    kPropertyTree = 3,
    kEquivalences = 4,
    kStats = 5,
    kBp = 6,
    kWTp = 7,
    kBo = 8,
    kBc = 9,
    kWToc = 10,
    kWToi = 11,
    kSubjects = 12,
    kMeta = 13,
  };

  struct SectionInfo {
    std::uint16_t id = 0;
    std::string name;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
  };

  Database();

  /// Schema statements found in the ABox input join the TBox; other
  /// statements in the TBox input are ignored.
  static Database build(std::vector<RawTriple> tbox_input, std::vector<RawTriple> abox_input,
                        const BuildOptions& options = {}, BuildReport* report = nullptr);
  static Database build_files(const std::string& tbox_path, const std::string& abox_path,
                              const BuildOptions& options = {}, BuildReport* report = nullptr);

  const Ontology& ontology() const { return ontology_; }
  const InstanceDictionary& dictionary() const { return dictionary_; }
  const DatasetStats& stats() const { return stats_; }
  const TripleStore& store() const { return store_; }
  const BuildOptions& options() const { return options_; }

  RawTriple decode(const EncodedTriple& t) const;
  /// Every stored triple, decoded, in store order.
  std::vector<RawTriple> dump() const;

  std::string serialize() const;
  /// Throws FormatError (with the byte offset) on any malformed input.
  static Database deserialize(std::string_view bytes);
  void save(const std::string& path) const;
  static Database load(const std::string& path);

  /// Section table of a serialized container.
  static std::vector<SectionInfo> sections(std::string_view bytes);
  static std::string section_name(std::uint16_t id);

 private:
  Ontology ontology_;
  InstanceDictionary dictionary_;
  DatasetStats stats_;
  TripleStore store_;
  BuildOptions options_;
};

DatasetStats compute_stats(std::span<const EncodedTriple> triples, const Ontology& ontology, std::uint32_t n_instances);

}  // namespace wfwl
