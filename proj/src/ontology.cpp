#include "wfwl/ontology.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <set>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

bool is_top_concept(std::string_view iri) { return iri == vocab::kOwlThing || iri == vocab::kRdfsResource; }

bool is_literal_type(std::string_view iri) {
  return iri == vocab::kRdfsLiteral || iri.starts_with(vocab::kXsd);
}

// Names with subclass cycles collapsed; reps are sorted and each component is
// named by its least IRI.
struct Collapsed {
  std::vector<std::string> reps;
  std::vector<std::vector<std::string>> aliases;
  std::map<std::string, std::int32_t> index;
  std::vector<std::set<std::int32_t>> parents;
};

Collapsed collapse_cycles(const std::set<std::string>& names,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<std::string> all(names.begin(), names.end());
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < all.size(); ++i) id[all[i]] = static_cast<int>(i);
  int n = static_cast<int>(all.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& [c, p] : edges) adj[id[c]].push_back(id[p]);

  // Iterative Tarjan.
  std::vector<int> comp(n, -1), low(n, 0), order(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0, n_comp = 0;
  for (int root = 0; root < n; ++root) {
    if (order[root] != -1) continue;
    std::vector<std::pair<int, std::size_t>> work{{root, 0}};
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next < adj[v].size()) {
        int w = adj[v][next++];
        if (order[w] == -1) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = n_comp;
        } while (w != v);
        ++n_comp;
      }
      int done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
    }
  }

  // Representative = least IRI; `all` is sorted so the first member wins.
  std::vector<std::vector<std::string>> members(n_comp);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(all[v]);
  std::vector<int> comp_order(n_comp);
  for (int c = 0; c < n_comp; ++c) comp_order[c] = c;
  std::sort(comp_order.begin(), comp_order.end(),
            [&](int a, int b) { return members[a].front() < members[b].front(); });
  std::vector<std::int32_t> comp_to_rep(n_comp);
  Collapsed out;
  for (int c : comp_order) {
    comp_to_rep[c] = static_cast<std::int32_t>(out.reps.size());
    out.reps.push_back(members[c].front());
    out.aliases.emplace_back(members[c].begin() + 1, members[c].end());
  }
  for (int v = 0; v < n; ++v) out.index[all[v]] = comp_to_rep[comp[v]];
  out.parents.resize(out.reps.size());
  for (const auto& [c, p] : edges) {
    auto a = out.index[c], b = out.index[p];
    if (a != b) out.parents[a].insert(b);
  }
  return out;
}

// Keeps only parents not implied through another parent.
std::vector<std::vector<std::int32_t>> transitive_reduction(const std::vector<std::set<std::int32_t>>& parents) {
  std::size_t n = parents.size();
  std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> anc(n);
  std::vector<int> state(n, 0);
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    if (state[v] == 2) return;
    state[v] = 1;
    anc[v].assign(words, 0);
    for (auto p : parents[v]) {
      visit(static_cast<std::size_t>(p));
      anc[v][p / 64] |= std::uint64_t{1} << (p % 64);
      for (std::size_t w = 0; w < words; ++w) anc[v][w] |= anc[p][w];
    }
    state[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v) visit(v);
  std::vector<std::vector<std::int32_t>> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto p : parents[v]) {
      bool implied = false;
      for (auto q : parents[v])
        if (q != p && ((anc[q][p / 64] >> (p % 64)) & 1u)) implied = true;
      if (!implied) out[v].push_back(p);
    }
  }
  return out;
}

// Local field width for a node with `m` children.
unsigned local_width(std::size_t m, bool is_root) {
  if (m == 0) return 0;
  if (is_root) return m == 1 ? 1 : static_cast<unsigned>(std::bit_width(m - 1));
  return static_cast<unsigned>(std::bit_width(m));  // ceil(log2(m + 1)): room for self = 0
}

// Assigns codes top-down along primary parents; alternates get a local value
// under each additional parent.
void assign_codes(std::vector<OntologyNode>& nodes, bool properties) {
  std::vector<std::vector<std::int32_t>> kids(nodes.size());
  for (std::size_t v = 1; v < nodes.size(); ++v) {
    kids[nodes[v].parent].push_back(static_cast<std::int32_t>(v));
    for (auto p : nodes[v].other_parents) kids[p].push_back(static_cast<std::int32_t>(v));
  }
  std::vector<std::int32_t> stack{0};
  nodes[0].code = nodes[0].self_code = PrefixCode();
  while (!stack.empty()) {
    std::int32_t v = stack.back();
    stack.pop_back();
    auto& k = kids[v];
    OntologyNode& node = nodes[v];
    unsigned width;
    std::uint64_t first_value;
    if (v == 0 && properties) {
      width = 2;  // rdf:type, datatype class, object class in node order
      first_value = 0;
    } else {
      std::sort(k.begin(), k.end(), [&](auto a, auto b) { return nodes[a].iri < nodes[b].iri; });
      width = local_width(k.size(), v == 0);
      first_value = v == 0 ? 0 : 1;
    }
    node.local_width = static_cast<std::uint8_t>(width);
    node.self_code = v == 0 ? node.code : node.code.append(0, width);
    node.children.clear();
    for (std::size_t i = 0; i < k.size(); ++i) {
      PrefixCode c = node.code.append(first_value + i, width);
      OntologyNode& kid = nodes[k[i]];
      if (kid.parent == v) {
        kid.code = c;
        node.children.push_back(k[i]);
        stack.push_back(k[i]);
      } else {
        kid.alternate_codes.push_back(c);
      }
    }
  }
  for (auto& n : nodes) std::sort(n.alternate_codes.begin(), n.alternate_codes.end());
}

void add_nodes(std::vector<OntologyNode>& nodes, const Collapsed& g,
               const std::vector<std::vector<std::int32_t>>& reduced, std::int32_t offset,
               const std::function<std::int32_t(std::size_t)>& root_parent) {
  for (std::size_t i = 0; i < g.reps.size(); ++i) {
    OntologyNode n;
    n.iri = g.reps[i];
    n.aliases = g.aliases[i];
    const auto& ps = reduced[i];
    if (ps.empty()) {
      n.parent = root_parent(i);
    } else {
      // Reps are sorted, so the smallest index is the least IRI.
      n.parent = ps.front() + offset;
      for (std::size_t j = 1; j < ps.size(); ++j) n.other_parents.push_back(ps[j] + offset);
    }
    nodes.push_back(std::move(n));
  }
}

}  // namespace

std::int32_t Hierarchy::find(std::string_view iri) const {
  auto it = by_iri_.find(std::string(iri));
  return it == by_iri_.end() ? kNone : it->second;
}

std::int32_t Hierarchy::find_code(const PrefixCode& code) const {
  auto it = by_code_.find(code.to_sentinel());
  return it == by_code_.end() ? kNone : it->second;
}

std::vector<PrefixCode> Hierarchy::equivalents(const PrefixCode& code) const {
  std::int32_t id = find_code(code);
  if (id == kNone || node(id).code != code) return {};
  return node(id).alternate_codes;
}

bool Hierarchy::subsumes(std::int32_t super, std::int32_t sub) const {
  if (super == 0) return true;
  const auto& a = ancestors_[sub];
  return std::binary_search(a.begin(), a.end(), super);
}

CodeTree Hierarchy::leaf_tree() const {
  std::vector<std::pair<PrefixCode, std::uint64_t>> leaves;
  for (std::size_t v = 1; v < nodes_.size(); ++v)
    if (is_element(static_cast<std::int32_t>(v))) leaves.emplace_back(nodes_[v].self_code, v);
  return CodeTree::from_leaves(leaves);
}

void Hierarchy::finalize() {
  by_iri_.clear();
  by_code_.clear();
  std::size_t n = nodes_.size();
  for (auto& node : nodes_) node.children.clear();
  for (std::size_t v = 1; v < n; ++v)
    nodes_[static_cast<std::size_t>(nodes_[v].parent)].children.push_back(static_cast<std::int32_t>(v));
  for (auto& node : nodes_)
    std::sort(node.children.begin(), node.children.end(),
              [&](auto a, auto b) { return nodes_[a].code < nodes_[b].code; });

  for (std::size_t v = 0; v < n; ++v) {
    auto id = static_cast<std::int32_t>(v);
    const auto& node = nodes_[v];
    if (!node.iri.empty()) {
      by_iri_.emplace(node.iri, id);
      for (const auto& a : node.aliases) by_iri_.emplace(a, id);
    }
    by_code_.emplace(node.code.to_sentinel(), id);
    by_code_.emplace(node.self_code.to_sentinel(), id);
  }

  // DAG ancestors (memoized; parents are acyclic).
  ancestors_.assign(n, {});
  std::vector<int> state(n, 0);
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    if (state[v] != 0) return;
    state[v] = 1;
    std::vector<std::int32_t> acc;
    if (is_element(static_cast<std::int32_t>(v))) acc.push_back(static_cast<std::int32_t>(v));
    auto add_from = [&](std::int32_t p) {
      if (p < 0) return;
      visit(static_cast<std::size_t>(p));
      acc.insert(acc.end(), ancestors_[p].begin(), ancestors_[p].end());
    };
    if (v != 0) {
      add_from(nodes_[v].parent);
      for (auto p : nodes_[v].other_parents) add_from(p);
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    ancestors_[v] = std::move(acc);
    state[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v) visit(v);

  // Expansion: own code plus the stored code of every node reachable through
  // an alternate position inside the set, minimized to disjoint prefixes.
  std::vector<std::int32_t> with_alternates;
  for (std::size_t v = 0; v < n; ++v)
    if (!nodes_[v].alternate_codes.empty()) with_alternates.push_back(static_cast<std::int32_t>(v));
  expansions_.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<PrefixCode> set{nodes_[v].code};
    auto covered = [&](const PrefixCode& c) {
      return std::any_of(set.begin(), set.end(), [&](const PrefixCode& s) { return s.is_prefix_of(c); });
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto x : with_alternates) {
        const auto& xn = nodes_[x];
        if (covered(xn.code)) continue;
        if (std::any_of(xn.alternate_codes.begin(), xn.alternate_codes.end(), covered)) {
          set.push_back(xn.code);
          changed = true;
        }
      }
    }
    std::vector<PrefixCode> minimal{set.front()};
    for (std::size_t i = 1; i < set.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < set.size(); ++j)
        if (j != i && set[j] != set[i] && set[j].is_prefix_of(set[i])) redundant = true;
      if (!redundant) minimal.push_back(set[i]);
    }
    std::sort(minimal.begin() + 1, minimal.end());
    expansions_[v] = std::move(minimal);
  }
}

void Hierarchy::serialize(ByteWriter& out) const {
  out.put_varint(nodes_.size());
  for (const auto& n : nodes_) {
    out.put_string(n.iri);
    out.put_varint(n.aliases.size());
    for (const auto& a : n.aliases) out.put_string(a);
    out.put_varint(static_cast<std::uint64_t>(n.parent + 1));
    out.put_varint(n.other_parents.size());
    for (auto p : n.other_parents) out.put_varint(static_cast<std::uint64_t>(p));
    out.put_varint(n.code.to_sentinel());
    out.put_varint(n.self_code.to_sentinel());
    out.put_u8(n.local_width);
    out.put_u8(static_cast<std::uint8_t>(n.property_class));
    out.put_varint(n.domains.size());
    for (auto d : n.domains) out.put_varint(static_cast<std::uint64_t>(d));
    out.put_varint(n.ranges.size());
    for (auto r : n.ranges) out.put_varint(static_cast<std::uint64_t>(r));
  }
}

namespace {

PrefixCode read_code(ByteReader& in) {
  std::uint64_t s = in.varint();
  try {
    return PrefixCode::from_sentinel(s);
  } catch (const EncodingError&) {
    in.fail("invalid prefix code");
  }
}

std::int32_t read_index(ByteReader& in, std::uint64_t limit, const char* what) {
  std::uint64_t v = in.varint();
  if (v >= limit) in.fail(std::string(what) + " index out of range");
  return static_cast<std::int32_t>(v);
}

std::uint64_t read_count(ByteReader& in) {
  std::uint64_t v = in.varint();
  if (v > in.remaining()) in.fail("count exceeds section size");
  return v;
}

}  // namespace

Hierarchy Hierarchy::deserialize(ByteReader& in, bool properties) {
  Hierarchy h;
  h.properties_ = properties;
  std::uint64_t n = read_count(in);
  if (n == 0) in.fail("hierarchy without root");
  h.nodes_.resize(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    OntologyNode& node = h.nodes_[v];
    node.iri = in.string();
    for (std::uint64_t k = read_count(in); k > 0; --k) node.aliases.push_back(in.string());
    std::uint64_t parent = in.varint();
    if (parent > n || (v == 0) != (parent == 0)) in.fail("invalid parent");
    node.parent = static_cast<std::int32_t>(parent) - 1;
    for (std::uint64_t k = read_count(in); k > 0; --k) node.other_parents.push_back(read_index(in, n, "parent"));
    node.code = read_code(in);
    node.self_code = read_code(in);
    node.local_width = in.u8();
    std::uint8_t cls = in.u8();
    if (cls > static_cast<std::uint8_t>(PropertyClass::Object)) in.fail("invalid property class");
    node.property_class = static_cast<PropertyClass>(cls);
    for (std::uint64_t k = read_count(in); k > 0; --k) node.domains.push_back(read_index(in, 1u << 31, "domain"));
    for (std::uint64_t k = read_count(in); k > 0; --k) node.ranges.push_back(read_index(in, 1u << 31, "range"));
  }
  // Parents must form a tree rooted at 0 whose codes extend each other.
  for (std::uint64_t v = 1; v < n; ++v) {
    const OntologyNode& node = h.nodes_[v];
    const OntologyNode& parent = h.nodes_[static_cast<std::size_t>(node.parent)];
    if (!parent.code.is_prefix_of(node.code) || node.code.length <= parent.code.length ||
        !node.code.is_prefix_of(node.self_code))
      in.fail("node code does not extend its parent");
  }
  return h;
}

bool operator==(const Hierarchy& a, const Hierarchy& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.iri != y.iri || x.aliases != y.aliases || x.parent != y.parent || x.other_parents != y.other_parents ||
        x.code != y.code || x.self_code != y.self_code || x.local_width != y.local_width ||
        x.alternate_codes != y.alternate_codes || x.property_class != y.property_class ||
        x.domains != y.domains || x.ranges != y.ranges)
      return false;
  }
  return true;
}

Ontology Ontology::classify(std::span<const RawTriple> tbox, std::span<const std::string> data_concepts,
                            std::span<const std::string> data_properties) {
  std::set<std::string> concept_names, property_names, literal_ranged;
  std::vector<std::pair<std::string, std::string>> concept_edges, property_edges;
  std::map<std::string, PropertyClass> declared;
  std::vector<std::pair<std::string, std::string>> domain_decls, range_decls;

  auto add_concept = [&](const std::string& iri) {
    if (!is_top_concept(iri)) concept_names.insert(iri);
  };
  auto add_property = [&](const std::string& iri) {
    if (iri != vocab::kRdfType) property_names.insert(iri);
  };

  for (const auto& t : tbox) {
    if (!t.subject.is_resource() || !t.object.is_resource()) continue;
    const std::string& s = t.subject.lexical;
    const std::string& p = t.predicate.lexical;
    const std::string& o = t.object.lexical;
    if (p == vocab::kRdfsSubClassOf) {
      add_concept(s);
      if (!is_top_concept(o) && s != o && !is_top_concept(s)) {
        add_concept(o);
        concept_edges.emplace_back(s, o);
      }
    } else if (p == vocab::kRdfsSubPropertyOf) {
      add_property(s);
      add_property(o);
      if (s != o && s != vocab::kRdfType && o != vocab::kRdfType) property_edges.emplace_back(s, o);
    } else if (p == vocab::kRdfsDomain) {
      add_property(s);
      if (!is_top_concept(o) && !is_literal_type(o)) {
        add_concept(o);
        domain_decls.emplace_back(s, o);
      }
    } else if (p == vocab::kRdfsRange) {
      add_property(s);
      if (is_literal_type(o)) {
        literal_ranged.insert(s);
      } else if (!is_top_concept(o)) {
        add_concept(o);
        range_decls.emplace_back(s, o);
      }
    } else if (p == vocab::kRdfType) {
      if (o == vocab::kOwlClass || o == vocab::kRdfsClass) {
        add_concept(s);
      } else if (o == vocab::kRdfProperty) {
        add_property(s);
      } else if (o == vocab::kOwlObjectProperty || o == vocab::kOwlDatatypeProperty) {
        add_property(s);
        auto cls = o == vocab::kOwlObjectProperty ? PropertyClass::Object : PropertyClass::Datatype;
        auto [it, inserted] = declared.emplace(s, cls);
        if (!inserted && it->second != cls) it->second = PropertyClass::Datatype;
      }
    }
  }
  for (const auto& c : data_concepts) add_concept(c);
  for (const auto& p : data_properties) add_property(p);

  Ontology out;

  // Concepts.
  Collapsed cg = collapse_cycles(concept_names, concept_edges);
  auto c_reduced = transitive_reduction(cg.parents);
  auto& cnodes = out.concepts_.nodes_;
  OntologyNode thing;
  thing.iri = std::string(vocab::kOwlThing);
  thing.aliases.push_back(std::string(vocab::kRdfsResource));
  cnodes.push_back(std::move(thing));
  add_nodes(cnodes, cg, c_reduced, 1, [](std::size_t) { return 0; });
  assign_codes(cnodes, false);
  out.concepts_.properties_ = false;

  // Properties: a component's class comes from its declarations, else from
  // the nearest declared ancestor, else from a literal range.
  Collapsed pg = collapse_cycles(property_names, property_edges);
  std::size_t np = pg.reps.size();
  std::vector<PropertyClass> cls(np, PropertyClass::None);
  for (const auto& [iri, c] : declared) {
    auto& slot = cls[pg.index.at(iri)];
    if (slot == PropertyClass::None || c == PropertyClass::Datatype) slot = c;
  }
  std::vector<bool> literal(np, false);
  for (const auto& iri : literal_ranged) literal[pg.index.at(iri)] = true;
  {
    std::vector<PropertyClass> resolved = cls;
    for (std::size_t i = 0; i < np; ++i) {
      if (resolved[i] != PropertyClass::None) continue;
      // Breadth-first over super-properties; the first declared one wins.
      std::vector<std::int32_t> frontier(pg.parents[i].begin(), pg.parents[i].end());
      std::set<std::int32_t> seen(frontier.begin(), frontier.end());
      while (!frontier.empty() && resolved[i] == PropertyClass::None) {
        std::vector<std::int32_t> next;
        for (auto f : frontier) {
          if (cls[f] != PropertyClass::None) {
            resolved[i] = cls[f];
            break;
          }
          for (auto g : pg.parents[f])
            if (seen.insert(g).second) next.push_back(g);
        }
        frontier = std::move(next);
      }
      if (resolved[i] == PropertyClass::None)
        resolved[i] = literal[i] ? PropertyClass::Datatype : PropertyClass::Object;
    }
    cls = std::move(resolved);
  }
  // A property never inherits across classes.
  for (std::size_t i = 0; i < np; ++i)
    for (auto it = pg.parents[i].begin(); it != pg.parents[i].end();)
      it = cls[*it] != cls[i] ? pg.parents[i].erase(it) : std::next(it);
  auto p_reduced = transitive_reduction(pg.parents);

  auto& pnodes = out.properties_.nodes_;
  pnodes.resize(4);
  pnodes[1].iri = std::string(vocab::kRdfType);
  pnodes[1].property_class = PropertyClass::Type;
  pnodes[2].property_class = PropertyClass::Datatype;
  pnodes[3].property_class = PropertyClass::Object;
  for (std::int32_t i = 1; i <= 3; ++i) pnodes[i].parent = 0;
  add_nodes(pnodes, pg, p_reduced, 4,
            [&](std::size_t i) { return cls[i] == PropertyClass::Datatype ? 2 : 3; });
  for (std::size_t i = 0; i < np; ++i) pnodes[4 + i].property_class = cls[i];
  auto concept_id = [&](const std::string& iri) { return cg.index.at(iri) + 1; };
  for (const auto& [p, c] : domain_decls) pnodes[4 + pg.index.at(p)].domains.push_back(concept_id(c));
  for (const auto& [p, c] : range_decls) {
    auto& node = pnodes[4 + pg.index.at(p)];
    if (node.property_class == PropertyClass::Object) node.ranges.push_back(concept_id(c));
  }
  for (auto& n : pnodes) {
    std::sort(n.domains.begin(), n.domains.end());
    n.domains.erase(std::unique(n.domains.begin(), n.domains.end()), n.domains.end());
    std::sort(n.ranges.begin(), n.ranges.end());
    n.ranges.erase(std::unique(n.ranges.begin(), n.ranges.end()), n.ranges.end());
  }
  assign_codes(pnodes, true);
  out.properties_.properties_ = true;

  out.concepts_.finalize();
  out.properties_.finalize();
  out.type_property_ = 1;
  return out;
}

namespace {

std::vector<std::int32_t> collect_effective(const Hierarchy& props, std::int32_t property,
                                            std::vector<std::int32_t> OntologyNode::*field) {
  std::vector<std::int32_t> out;
  for (auto a : props.ancestors(property)) {
    const auto& v = props.node(a).*field;
    out.insert(out.end(), v.begin(), v.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_equivalences(ByteWriter& out, const Hierarchy& h) {
  std::vector<std::int32_t> ids;
  for (std::size_t v = 0; v < h.size(); ++v)
    if (!h.node(static_cast<std::int32_t>(v)).alternate_codes.empty()) ids.push_back(static_cast<std::int32_t>(v));
  out.put_varint(ids.size());
  for (auto id : ids) {
    out.put_varint(static_cast<std::uint64_t>(id));
    const auto& alts = h.node(id).alternate_codes;
    out.put_varint(alts.size());
    for (const auto& c : alts) out.put_varint(c.to_sentinel());
  }
}

}  // namespace

std::vector<std::int32_t> Ontology::effective_domains(std::int32_t property) const {
  return collect_effective(properties_, property, &OntologyNode::domains);
}

std::vector<std::int32_t> Ontology::effective_ranges(std::int32_t property) const {
  return collect_effective(properties_, property, &OntologyNode::ranges);
}

void Ontology::serialize_equivalences(ByteWriter& out) const {
  write_equivalences(out, concepts_);
  write_equivalences(out, properties_);
}

Ontology Ontology::deserialize(ByteReader& concepts, ByteReader& properties, ByteReader& equivalences) {
  Ontology o;
  o.concepts_ = Hierarchy::deserialize(concepts, false);
  concepts.expect_end("concept section");
  o.properties_ = Hierarchy::deserialize(properties, true);
  properties.expect_end("property section");
  if (o.properties_.size() < 4 || o.properties_.nodes_[1].iri != vocab::kRdfType ||
      o.properties_.nodes_[1].code != type_code())
    properties.fail("property hierarchy lacks rdf:type");

  auto n_concepts = static_cast<std::int32_t>(o.concepts_.size());
  for (const auto& n : o.properties_.nodes_)
    for (const auto* list : {&n.domains, &n.ranges})
      for (auto c : *list)
        if (c <= 0 || c >= n_concepts) properties.fail("domain or range outside the concept hierarchy");

  for (Hierarchy* h : {&o.concepts_, &o.properties_}) {
    for (std::uint64_t k = read_count(equivalences); k > 0; --k) {
      std::int32_t id = read_index(equivalences, h->size(), "node");
      auto& alts = h->nodes_[static_cast<std::size_t>(id)].alternate_codes;
      for (std::uint64_t j = read_count(equivalences); j > 0; --j) alts.push_back(read_code(equivalences));
    }
  }
  equivalences.expect_end("equivalence section");

  // Parent chains must terminate at the root.
  for (Hierarchy* h : {&o.concepts_, &o.properties_}) {
    for (const auto& n : h->nodes_)
      for (auto p : n.other_parents)
        if (p == 0 || static_cast<std::size_t>(p) >= h->size()) equivalences.fail("invalid alternate parent");
    try {
      h->leaf_tree();
    } catch (const EncodingError& e) {
      concepts.fail(std::string("inconsistent codes: ") + e.what());
    }
    h->finalize();
  }
  o.type_property_ = 1;
  return o;
}

}  // namespace wfwl
