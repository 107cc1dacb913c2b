#include "wfwl/store.hpp"

#include <string>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"

namespace wfwl {

TripleStore::TripleStore() {
  wt_oi_ = WaveletTree::build({}, CodeTree::fixed_width(1, 1, 1));
}

TripleStore TripleStore::build(std::span<const EncodedTriple> triples, const CodeTree& property_tree,
                               const CodeTree& concept_tree, std::uint32_t n_instances, PrefixCode type_code) {
  TripleStore st;
  st.n_instances_ = n_instances;
  st.id_width_ = CodeTree::width_for(n_instances);
  st.type_code_ = type_code;

  BitVectorBuilder b_p, b_o, b_c;
  std::vector<PrefixCode> predicates, concepts, instances;
  std::vector<bool> subject_bits(std::size_t{n_instances} + 1, false);
  b_o.reserve(triples.size());
  b_c.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const EncodedTriple& t = triples[i];
    if (i > 0 && !(triples[i - 1] < t))
      throw BuildError("triples are not strictly increasing at position " + std::to_string(i));
    if (t.s == 0 || t.s > n_instances) throw BuildError("subject id out of range");
    if (t.is_concept != (t.p == type_code)) throw BuildError("concept objects must appear exactly under rdf:type");
    if (!t.is_concept && (t.oi == 0 || t.oi > n_instances)) throw BuildError("object id out of range");
    bool new_subject = i == 0 || triples[i - 1].s != t.s;
    bool new_node = new_subject || triples[i - 1].p != t.p;
    if (new_node) {
      b_p.push_back(new_subject);
      predicates.push_back(t.p);
    }
    subject_bits[t.s] = true;
    b_o.push_back(new_node);
    b_c.push_back(t.is_concept);
    if (t.is_concept)
      concepts.push_back(t.oc);
    else
      instances.push_back(PrefixCode(t.oi, st.id_width_));
  }
  st.b_p_ = std::move(b_p).build();
  st.b_o_ = std::move(b_o).build();
  st.b_c_ = std::move(b_c).build();
  st.subjects_ = BitVector(subject_bits);
  try {
    st.wt_p_ = WaveletTree::build(predicates, property_tree);
    st.wt_oc_ = WaveletTree::build(concepts, concept_tree);
  } catch (const EncodingError& e) {
    throw BuildError(std::string("code outside the hierarchy: ") + e.what());
  }
  st.wt_oi_ = WaveletTree::build(instances, CodeTree::fixed_width(st.id_width_, 1, std::max<std::uint32_t>(n_instances, 1)));
  st.check_invariants();
  return st;
}

std::uint64_t TripleStore::node_begin(std::uint64_t k) const { return b_p_.select1(k + 1); }

std::uint64_t TripleStore::node_end(std::uint64_t k) const {
  return k + 1 < b_p_.count(true) ? b_p_.select1(k + 2) : b_p_.size();
}

std::uint64_t TripleStore::object_begin(std::uint64_t node) const { return b_o_.select1(node + 1); }

std::uint64_t TripleStore::object_end(std::uint64_t node) const {
  return node + 1 < b_o_.count(true) ? b_o_.select1(node + 2) : b_o_.size();
}

std::optional<std::uint64_t> TripleStore::subject_ordinal(std::uint32_t id) const {
  if (id == 0 || id >= subjects_.size() || !subjects_.access(id)) return std::nullopt;
  return subjects_.rank1(id);
}

void TripleStore::validate(const TriplePattern& pattern) const {
  if (pattern.o.kind == ObjectSlot::Kind::Concept && pattern.p && !pattern.p->is_prefix_of(type_code_))
    throw QueryError("a concept object requires rdf:type or an unbound predicate");
}

Cursor TripleStore::resolve(const TriplePattern& pattern) const {
  validate(pattern);
  Cursor c;
  c.store_ = this;
  c.pattern_ = pattern;
  c.route_ = Cursor::Route::Empty;
  const auto& p = pattern.p;

  if (p && wt_p_.count_prefix(*p) == 0) return c;

  if (pattern.s) {
    auto k = subject_ordinal(*pattern.s);
    if (!k) return c;
    c.route_ = Cursor::Route::Nodes;
    c.node_ = node_begin(*k);
    c.node_end_ = node_end(*k);
    return c;
  }

  if (pattern.o.kind == ObjectSlot::Kind::Instance) {
    std::uint32_t id = pattern.o.id;
    if (id == 0 || id > n_instances_) return c;
    PrefixCode code = instance_code(id);
    std::uint64_t n = wt_oi_.rank(code, wt_oi_.size());
    if (!p || n <= wt_p_.count_prefix(*p)) {
      c.route_ = Cursor::Route::InstanceSelect;
      c.select_code_ = code;
      c.ordinal_end_ = n;
      return c;
    }
  } else if (pattern.o.kind == ObjectSlot::Kind::Concept) {
    c.route_ = Cursor::Route::ConceptSelect;
    c.select_code_ = pattern.o.prefix;
    c.ordinal_end_ = wt_oc_.count_prefix(pattern.o.prefix);
    return c;
  }

  if (p && p->length > 0) {
    c.route_ = Cursor::Route::PredicateSelect;
    c.select_code_ = *p;
    c.ordinal_end_ = wt_p_.count_prefix(*p);
    return c;
  }

  c.route_ = Cursor::Route::Nodes;
  c.node_ = 0;
  c.node_end_ = b_p_.size();
  return c;
}

bool Cursor::matches_object(std::uint64_t g) const {
  const TripleStore& st = *store_;
  switch (pattern_.o.kind) {
    case ObjectSlot::Kind::Any:
      return true;
    case ObjectSlot::Kind::Instance:
      return !st.b_c_.access(g) && st.wt_oi_.access(st.b_c_.rank0(g)).bits == pattern_.o.id;
    case ObjectSlot::Kind::Concept:
      return st.b_c_.access(g) && pattern_.o.prefix.is_prefix_of(st.wt_oc_.access(st.b_c_.rank1(g)));
  }
  return false;
}

void Cursor::emit(std::uint64_t node, std::uint64_t g, EncodedTriple& out) const {
  const TripleStore& st = *store_;
  out.s = st.subject_id(st.subject_of_node(node));
  out.p = st.wt_p_.access(node);
  out.is_concept = st.b_c_.access(g);
  if (out.is_concept) {
    out.oc = st.wt_oc_.access(st.b_c_.rank1(g));
    out.oi = 0;
  } else {
    out.oc = PrefixCode();
    out.oi = static_cast<std::uint32_t>(st.wt_oi_.access(st.b_c_.rank0(g)).bits);
  }
}

bool Cursor::next(EncodedTriple& out) {
  if (!store_) return false;
  const TripleStore& st = *store_;
  switch (route_) {
    case Route::Empty:
      return false;

    case Route::Nodes:
    case Route::PredicateSelect:
      for (;;) {
        if (in_node_) {
          while (obj_ < obj_end_) {
            std::uint64_t g = obj_++;
            if (matches_object(g)) {
              emit(node_, g, out);
              return true;
            }
          }
          in_node_ = false;
          if (route_ == Route::Nodes) ++node_;
        }
        if (route_ == Route::Nodes) {
          while (node_ < node_end_ && pattern_.p && !pattern_.p->is_prefix_of(st.wt_p_.access(node_))) ++node_;
          if (node_ >= node_end_) return false;
        } else {
          if (ordinal_ > ordinal_end_) return false;
          node_ = st.wt_p_.select_prefix(select_code_, ordinal_++);
        }
        obj_ = st.object_begin(node_);
        obj_end_ = st.object_end(node_);
        in_node_ = true;
      }

    case Route::InstanceSelect:
    case Route::ConceptSelect:
      while (ordinal_ <= ordinal_end_) {
        std::uint64_t g;
        if (route_ == Route::InstanceSelect)
          g = st.b_c_.select0(st.wt_oi_.select(select_code_, ordinal_++) + 1);
        else
          g = st.b_c_.select1(st.wt_oc_.select_prefix(select_code_, ordinal_++) + 1);
        std::uint64_t node = st.node_of_object(g);
        if (pattern_.p && !pattern_.p->is_prefix_of(st.wt_p_.access(node))) continue;
        emit(node, g, out);
        return true;
      }
      return false;
  }
  return false;
}

std::uint64_t TripleStore::count(const TriplePattern& pattern) const {
  validate(pattern);
  const auto& p = pattern.p;
  bool any_o = pattern.o.kind == ObjectSlot::Kind::Any;
  bool p_all = !p || p->length == 0;

  if (!pattern.s && p_all && any_o) return n_triples();
  if (pattern.s && p_all && any_o) {
    auto k = subject_ordinal(*pattern.s);
    if (!k) return 0;
    std::uint64_t lo = node_begin(*k), hi = node_end(*k);
    std::uint64_t end = hi < b_p_.size() ? object_begin(hi) : n_triples();
    return end - object_begin(lo);
  }
  if (!pattern.s && p_all && pattern.o.kind == ObjectSlot::Kind::Instance) {
    if (pattern.o.id == 0 || pattern.o.id > n_instances_) return 0;
    return wt_oi_.rank(instance_code(pattern.o.id), wt_oi_.size());
  }
  if (!pattern.s && pattern.o.kind == ObjectSlot::Kind::Concept) return wt_oc_.count_prefix(pattern.o.prefix);
  if (!pattern.s && any_o && p) {
    if (*p == type_code_) return b_c_.count(true);
    std::uint64_t total = 0;
    std::uint64_t n = wt_p_.count_prefix(*p);
    for (std::uint64_t i = 1; i <= n; ++i) {
      std::uint64_t node = wt_p_.select_prefix(*p, i);
      total += object_end(node) - object_begin(node);
    }
    return total;
  }
  std::uint64_t total = 0;
  Cursor c = resolve(pattern);
  EncodedTriple t;
  while (c.next(t)) ++total;
  return total;
}

std::vector<EncodedTriple> TripleStore::triples() const {
  std::vector<EncodedTriple> out;
  out.reserve(n_triples());
  Cursor c = resolve({});
  EncodedTriple t;
  while (c.next(t)) out.push_back(t);
  return out;
}

void TripleStore::check_invariants() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw BuildError(std::string("store invariant violated: ") + what);
  };
  require(b_p_.size() == wt_p_.size(), "|B_p| = |WT_p|");
  require(b_p_.count(true) == subjects_.count(true), "ones in B_p = number of subjects");
  require(subjects_.size() == std::size_t{n_instances_} + 1 && (subjects_.size() == 0 || !subjects_.access(0)),
          "subject map covers ids 1..N");
  require(b_o_.size() == b_c_.size(), "|B_o| = |B_c|");
  require(b_o_.count(true) == b_p_.size(), "ones in B_o = |B_p|");
  require(b_c_.count(true) == wt_oc_.size(), "ones in B_c = |WT_oc|");
  require(b_c_.size() - b_c_.count(true) == wt_oi_.size(), "zeros in B_c = |WT_oi|");
  require(b_o_.size() == 0 || (b_o_.access(0) && b_p_.access(0)), "first node and object open their groups");
  require(id_width_ == CodeTree::width_for(n_instances_) && wt_oi_.code_tree().is_fixed_width(), "instance id width");
  for (std::uint64_t j = 0; j < b_p_.size(); ++j) {
    bool type = wt_p_.access(j) == type_code_;
    std::uint64_t lo = object_begin(j), hi = object_end(j);
    require(lo < hi, "every predicate node has an object");
    for (std::uint64_t g = lo; g < hi; ++g) require(b_c_.access(g) == type, "B_c flags exactly the rdf:type objects");
  }
  for (std::uint64_t i = 0; i < wt_oi_.size(); ++i) {
    auto id = wt_oi_.access(i).bits;
    require(id >= 1 && id <= n_instances_, "instance ids in 1..N");
  }
}

void TripleStore::serialize_meta(ByteWriter& out) const {
  out.put_varint(n_instances_);
  out.put_u8(static_cast<std::uint8_t>(id_width_));
  out.put_varint(type_code_.to_sentinel());
}

void TripleStore::serialize_layer(int layer, ByteWriter& out) const {
  switch (layer) {
    case 0: b_p_.serialize(out); break;
    case 1: wt_p_.serialize(out); break;
    case 2: b_o_.serialize(out); break;
    case 3: b_c_.serialize(out); break;
    case 4: wt_oc_.serialize(out); break;
    case 5: wt_oi_.serialize(out); break;
    case 6: subjects_.serialize(out); break;
    default: throw RangeError("no such store layer");
  }
}

TripleStore TripleStore::deserialize(ByteReader& meta, std::span<ByteReader> layers) {
  if (layers.size() != kLayerCount) throw RangeError("store needs every layer");
  TripleStore st;
  std::uint64_t n = meta.varint();
  if (n >= (std::uint64_t{1} << 32)) meta.fail("instance count out of range");
  st.n_instances_ = static_cast<std::uint32_t>(n);
  st.id_width_ = meta.u8();
  std::uint64_t type = meta.varint();
  if (type == 0) meta.fail("invalid type code");
  st.type_code_ = PrefixCode::from_sentinel(type);
  meta.expect_end("store metadata");

  st.b_p_ = BitVector::deserialize(layers[0]);
  st.wt_p_ = WaveletTree::deserialize(layers[1]);
  st.b_o_ = BitVector::deserialize(layers[2]);
  st.b_c_ = BitVector::deserialize(layers[3]);
  st.wt_oc_ = WaveletTree::deserialize(layers[4]);
  st.wt_oi_ = WaveletTree::deserialize(layers[5]);
  st.subjects_ = BitVector::deserialize(layers[6]);
  for (auto& r : layers) r.expect_end("store layer");
  try {
    st.check_invariants();
  } catch (const Error& e) {
    meta.fail(e.what());
  }
  return st;
}

}  // namespace wfwl
