#include "wfwl/database.hpp"

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"
#include "wfwl/ingest.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

constexpr std::string_view kMagic = "WFWL";
constexpr std::size_t kHeaderSize = 8;       // magic, version, section count
constexpr std::size_t kEntrySize = 2 + 8 * 3;  // id, offset, length, checksum

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Ancestors in the DAG plus the primary chain up to the root, so synthetic
// nodes and the root are counted too.
std::vector<std::int32_t> counted_nodes(const Hierarchy& h, std::int32_t id) {
  std::vector<std::int32_t> out = h.ancestors(id);
  for (std::int32_t v = id; v != Hierarchy::kNone; v = h.node(v).parent)
    if (!h.is_element(v)) out.push_back(v);
  return out;
}

}  // namespace

DatasetStats compute_stats(std::span<const EncodedTriple> triples, const Ontology& ontology,
                           std::uint32_t n_instances) {
  const Hierarchy& concepts = ontology.concepts();
  const Hierarchy& properties = ontology.properties();
  DatasetStats s;
  s.n_triples = triples.size();
  s.subject_occ.assign(std::size_t{n_instances} + 1, 0);
  s.object_occ.assign(std::size_t{n_instances} + 1, 0);
  s.concept_direct.assign(concepts.size(), 0);
  s.concept_entailed.assign(concepts.size(), 0);
  s.property_direct.assign(properties.size(), 0);
  s.property_entailed.assign(properties.size(), 0);

  std::map<PrefixCode, std::uint64_t> by_concept, by_property;
  std::set<std::uint32_t> subjects, objects;
  for (const auto& t : triples) {
    ++s.subject_occ[t.s];
    subjects.insert(t.s);
    ++by_property[t.p];
    if (t.is_concept) {
      ++s.n_type_triples;
      ++by_concept[t.oc];
    } else {
      ++s.object_occ[t.oi];
      objects.insert(t.oi);
    }
  }
  s.n_subjects = subjects.size();
  s.n_objects = objects.size() + by_concept.size();
  s.n_predicates = by_property.size();
  for (const auto& [code, n] : by_concept) {
    auto id = concepts.find_code(code);
    s.concept_direct[id] += n;
    for (auto a : counted_nodes(concepts, id)) s.concept_entailed[a] += n;
  }
  for (const auto& [code, n] : by_property) {
    auto id = properties.find_code(code);
    s.property_direct[id] += n;
    for (auto a : counted_nodes(properties, id)) s.property_entailed[a] += n;
  }
  return s;
}

Database::Database() = default;

Database Database::build(std::vector<RawTriple> tbox_input, std::vector<RawTriple> abox_input,
                         const BuildOptions& options, BuildReport* report) {
  BuildReport r;
  r.input_triples = tbox_input.size() + abox_input.size();
  auto schema = split_tbox_abox(std::move(tbox_input));
  auto data = split_tbox_abox(std::move(abox_input));
  r.ignored_tbox_triples = schema.abox.size();
  std::vector<RawTriple> tbox = std::move(schema.tbox);
  tbox.insert(tbox.end(), data.tbox.begin(), data.tbox.end());
  std::vector<RawTriple> abox = std::move(data.abox);
  r.tbox_triples = tbox.size();
  r.abox_triples = abox.size();
  r.dropped_top_typings = drop_top_typings(abox);

  auto vocabulary = data_vocabulary(abox);
  Database db;
  db.options_ = options;
  db.ontology_ = Ontology::classify(tbox, vocabulary.concepts, vocabulary.properties);
  if (options.materialize) {
    auto m = materialize_domain_range(abox, db.ontology_, {options.drop_superseded});
    r.materialized = m.added;
    r.superseded = m.removed;
  }

  auto built = InstanceDictionary::build(instance_terms(abox), options.policy);
  auto encoded = encode_and_sort(abox, built.ids, db.ontology_);
  db.dictionary_ = std::move(built.dictionary);
  auto n = static_cast<std::uint32_t>(db.dictionary_.size());
  db.store_ = TripleStore::build(encoded, db.ontology_.properties().leaf_tree(), db.ontology_.concepts().leaf_tree(),
                                 n, Ontology::type_code());
  db.stats_ = compute_stats(encoded, db.ontology_, n);
  db.stats_.n_materialized = r.materialized;
  db.stats_.n_superseded = r.superseded;
  r.stored_triples = encoded.size();
  if (report) *report = r;
  return db;
}

Database Database::build_files(const std::string& tbox_path, const std::string& abox_path,
                               const BuildOptions& options, BuildReport* report) {
  auto tbox = tbox_path.empty() ? std::vector<RawTriple>{} : parse_ntriples_file(tbox_path, "t");
  auto abox = parse_ntriples_file(abox_path, "a");
  return build(std::move(tbox), std::move(abox), options, report);
}

RawTriple Database::decode(const EncodedTriple& t) const {
  RawTriple out;
  out.subject = dictionary_.decode(t.s);
  auto p = ontology_.properties().find_code(t.p);
  if (p == Hierarchy::kNone) throw FormatError("undecodable property code " + t.p.to_string(), 0);
  out.predicate = Term::iri(ontology_.properties().node(p).iri);
  if (t.is_concept) {
    auto c = ontology_.concepts().find_code(t.oc);
    if (c == Hierarchy::kNone) throw FormatError("undecodable concept code " + t.oc.to_string(), 0);
    out.object = Term::iri(ontology_.concepts().node(c).iri);
  } else {
    out.object = dictionary_.decode(t.oi);
  }
  return out;
}

std::vector<RawTriple> Database::dump() const {
  std::vector<RawTriple> out;
  Cursor c = store_.resolve({});
  EncodedTriple t;
  while (c.next(t)) out.push_back(decode(t));
  return out;
}

std::string Database::serialize() const {
  std::vector<std::pair<std::uint16_t, std::string>> payloads;
  auto add = [&](std::uint16_t id, auto&& write) {
    ByteWriter w;
    write(w);
    payloads.emplace_back(id, w.take());
  };
  add(kDictionary, [&](ByteWriter& w) { dictionary_.serialize(w); });
  add(kConceptTree, [&](ByteWriter& w) { ontology_.serialize_concepts(w); });
  add(kPropertyTree, [&](ByteWriter& w) { ontology_.serialize_properties(w); });
  add(kEquivalences, [&](ByteWriter& w) { ontology_.serialize_equivalences(w); });
  add(kStats, [&](ByteWriter& w) { stats_.serialize(w); });
  for (int layer = 0; layer < TripleStore::kLayerCount; ++layer)
    add(static_cast<std::uint16_t>(kBp + layer), [&](ByteWriter& w) { store_.serialize_layer(layer, w); });
  add(kMeta, [&](ByteWriter& w) {
    w.put_u8(static_cast<std::uint8_t>(options_.policy));
    w.put_u8(options_.materialize);
    w.put_u8(options_.drop_superseded);
    store_.serialize_meta(w);
  });

  ByteWriter out;
  out.put_bytes(kMagic);
  out.put_u16(kFormatVersion);
  out.put_u16(static_cast<std::uint16_t>(payloads.size()));
  std::uint64_t offset = kHeaderSize + kEntrySize * payloads.size();
  for (const auto& [id, bytes] : payloads) {
    out.put_u16(id);
    out.put_u64(offset);
    out.put_u64(bytes.size());
    out.put_u64(fnv1a(bytes));
    offset += bytes.size();
  }
  for (const auto& [id, bytes] : payloads) out.put_bytes(bytes);
  return out.take();
}

std::string Database::section_name(std::uint16_t id) {
  static const std::array<const char*, 14> names{"?",    "dict",  "concept_tree", "property_tree", "equivalences",
                                                 "stats", "B_p",   "WT_p",         "B_o",           "B_c",
                                                 "WT_oc", "WT_oi", "subjects",     "meta"};
  return id < names.size() ? names[id] : "unknown";
}

std::vector<Database::SectionInfo> Database::sections(std::string_view bytes) {
  ByteReader in(bytes);
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic)
    throw FormatError("not a WFWL container (bad magic)", 0);
  in.bytes(kMagic.size());
  std::uint16_t version = in.u16();
  if (version != kFormatVersion)
    throw FormatError("unsupported format version " + std::to_string(version), kMagic.size());
  std::uint16_t count = in.u16();
  std::vector<SectionInfo> out;
  std::set<std::uint16_t> seen;
  for (std::uint16_t i = 0; i < count; ++i) {
    std::uint64_t at = in.offset();
    SectionInfo s;
    s.id = in.u16();
    s.offset = in.u64();
    s.length = in.u64();
    std::uint64_t checksum = in.u64();
    s.name = section_name(s.id);
    if (s.id < kDictionary || s.id > kMeta) throw FormatError("unknown section id " + std::to_string(s.id), at);
    if (!seen.insert(s.id).second) throw FormatError("duplicate section " + s.name, at);
    if (s.offset > bytes.size() || s.length > bytes.size() - s.offset)
      throw FormatError("section " + s.name + " extends past the end of the file", at);
    if (fnv1a(bytes.substr(s.offset, s.length)) != checksum)
      throw FormatError("checksum mismatch in section " + s.name, s.offset);
    out.push_back(std::move(s));
  }
  for (std::uint16_t id = kDictionary; id <= kMeta; ++id)
    if (!seen.count(id)) throw FormatError("missing section " + section_name(id), kHeaderSize);
  return out;
}

Database Database::deserialize(std::string_view bytes) {
  auto table = sections(bytes);
  std::map<std::uint16_t, ByteReader> readers;
  for (const auto& s : table) readers.emplace(s.id, ByteReader(bytes.substr(s.offset, s.length), s.offset));
  auto r = [&](std::uint16_t id) -> ByteReader& { return readers.at(id); };

  Database db;
  ByteReader& meta = r(kMeta);
  std::uint8_t policy = meta.u8();
  if (policy > 1) meta.fail("invalid dictionary policy");
  db.options_.policy = static_cast<DictPolicy>(policy);
  db.options_.materialize = meta.u8() != 0;
  db.options_.drop_superseded = meta.u8() != 0;

  db.dictionary_ = InstanceDictionary::deserialize(r(kDictionary));
  r(kDictionary).expect_end("dictionary section");
  db.ontology_ = Ontology::deserialize(r(kConceptTree), r(kPropertyTree), r(kEquivalences));
  db.stats_ = DatasetStats::deserialize(r(kStats));
  r(kStats).expect_end("stats section");
  std::vector<ByteReader> layers;
  for (int layer = 0; layer < TripleStore::kLayerCount; ++layer) layers.push_back(r(static_cast<std::uint16_t>(kBp + layer)));
  db.store_ = TripleStore::deserialize(meta, layers);

  const auto& c = db.ontology_.concepts();
  const auto& p = db.ontology_.properties();
  if (db.store_.n_instances() != db.dictionary_.size()) r(kDictionary).fail("dictionary size disagrees with the store");
  if (!(db.store_.wt_p().code_tree() == p.leaf_tree())) r(kWTp).fail("WT_p code tree disagrees with the property hierarchy");
  if (!(db.store_.wt_oc().code_tree() == c.leaf_tree())) r(kWToc).fail("WT_oc code tree disagrees with the concept hierarchy");
  if (db.store_.type_code() != Ontology::type_code()) r(kMeta).fail("unexpected rdf:type code");
  const auto& s = db.stats_;
  if (s.n_triples != db.store_.n_triples() || s.subject_occ.size() != db.dictionary_.size() + 1 ||
      s.object_occ.size() != db.dictionary_.size() + 1 || s.concept_direct.size() != c.size() ||
      s.concept_entailed.size() != c.size() || s.property_direct.size() != p.size() ||
      s.property_entailed.size() != p.size())
    r(kStats).fail("statistics disagree with the store");
  return db;
}

void Database::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot open " + path + " for writing");
  std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IngestError("failed writing " + path);
}

Database Database::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace wfwl
