#include "wfwl/query.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "wfwl/error.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl {
namespace {

// A bound value: kind in the high word, id in the low word. Concept and
// property ids are hierarchy node ids.
using Value = std::uint64_t;
constexpr Value kUnbound = 0;
enum ValueKind : std::uint64_t { kInstance = 1, kConcept = 2, kProperty = 3 };

constexpr Value make_value(ValueKind k, std::uint64_t id) { return (static_cast<std::uint64_t>(k) << 32) | id; }
constexpr ValueKind kind_of(Value v) { return static_cast<ValueKind>(v >> 32); }
constexpr std::uint32_t id_of(Value v) { return static_cast<std::uint32_t>(v); }

using Row = std::vector<Value>;

struct RowHash {
  std::size_t operator()(const Row& r) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (Value v : r) h = (h ^ std::hash<Value>()(v)) * 0x100000001b3ull;
    return h;
  }
};

enum class Truth { False, True, Error };

bool is_numeric_type(std::string_view dt) {
  if (!dt.starts_with(vocab::kXsd)) return false;
  static const std::set<std::string_view> names{
      "integer", "decimal", "double", "float", "int", "long", "short", "byte", "nonNegativeInteger",
      "positiveInteger", "negativeInteger", "nonPositiveInteger", "unsignedInt", "unsignedLong", "unsignedShort",
      "unsignedByte"};
  return names.count(dt.substr(vocab::kXsd.size())) > 0;
}

std::optional<double> numeric_value(const Term& t) {
  if (!t.is_literal() || !is_numeric_type(t.datatype)) return std::nullopt;
  std::string_view s = t.lexical;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_plain_string(const Term& t) {
  return t.is_literal() && t.lang.empty() && (t.datatype.empty() || t.datatype == std::string(vocab::kXsd) + "string");
}

// Ordering for ORDER BY: unbound, then IRIs, then literals; numbers
// numerically, everything else by code point.
int order_compare(const std::optional<Term>& a, const std::optional<Term>& b) {
  if (!a || !b) return a ? 1 : b ? -1 : 0;
  int ra = a->is_literal() ? 2 : 1, rb = b->is_literal() ? 2 : 1;
  if (ra != rb) return ra < rb ? -1 : 1;
  auto na = numeric_value(*a), nb = numeric_value(*b);
  if (na && nb && *na != *nb) return *na < *nb ? -1 : 1;
  if (int c = a->lexical.compare(b->lexical)) return c < 0 ? -1 : 1;
  if (int c = a->datatype.compare(b->datatype)) return c < 0 ? -1 : 1;
  if (int c = a->lang.compare(b->lang)) return c < 0 ? -1 : 1;
  return 0;
}

}  // namespace

std::string_view to_string(Entailment e) { return e == Entailment::Simple ? "simple" : "rdfs"; }

Entailment entailment_from_string(std::string_view s) {
  if (s == "simple") return Entailment::Simple;
  if (s == "rdfs") return Entailment::Rdfs;
  throw QueryError("unknown entailment regime: " + std::string(s));
}

QueryEngine::QueryEngine(const Database& db) : db_(db) {
  const auto& dict = db.dictionary();
  const auto& concepts = db.ontology().concepts();
  const auto& properties = db.ontology().properties();
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    auto id = dict.encode(Term::iri(concepts.node(static_cast<std::int32_t>(i)).iri));
    concept_values_.push_back(id ? make_value(kInstance, id) : make_value(kConcept, i));
  }
  for (std::size_t i = 0; i < properties.size(); ++i) {
    const std::string& iri = properties.node(static_cast<std::int32_t>(i)).iri;
    auto id = dict.encode(Term::iri(iri));
    auto c = concepts.find(iri);
    if (id)
      property_values_.push_back(make_value(kInstance, id));
    else if (c != Hierarchy::kNone && concepts.is_element(c))
      property_values_.push_back(make_value(kConcept, static_cast<std::uint64_t>(c)));
    else
      property_values_.push_back(make_value(kProperty, i));
  }
}

class Evaluator {
 public:
  Evaluator(const QueryEngine& engine, const Query& query, Entailment entailment, ExecStats& stats)
      : e_(engine),
        db_(engine.db_),
        store_(db_.store()),
        concepts_(db_.ontology().concepts()),
        properties_(db_.ontology().properties()),
        dict_(db_.dictionary()),
        st_(db_.stats()),
        rdfs_(entailment == Entailment::Rdfs),
        stats_(stats) {
    for (const auto& v : query.where.variables()) var_index(v);
    for (const auto& v : query.output_variables()) var_index(v);
    for (const auto& k : query.order_by) var_index(k.var);
    collect_filter_vars(query.where);
  }

  std::size_t var_index(const std::string& name) {
    auto [it, inserted] = vars_.emplace(name, vars_.size());
    if (inserted) names_.push_back(name);
    return it->second;
  }
  std::size_t width() const { return vars_.size(); }

  /// Rows of the where clause, or nullopt when the top-level group is unsatisfiable.
  std::optional<std::vector<Row>> run(const GroupPattern& where) {
    if (!group_satisfiable(where)) return std::nullopt;
    return eval_group(where, {Row(width(), kUnbound)}, true);
  }

  Term decode(Value v) const {
    switch (kind_of(v)) {
      case kInstance: return dict_.decode(id_of(v));
      case kConcept: return Term::iri(concepts_.node(static_cast<std::int32_t>(id_of(v))).iri);
      case kProperty: return Term::iri(properties_.node(static_cast<std::int32_t>(id_of(v))).iri);
    }
    throw Error("internal error: undecodable value");
  }

 private:
  // ---- slot conversions ---------------------------------------------------

  std::optional<std::uint32_t> term_instance(const Term& t) const {
    auto id = dict_.encode(t);
    return id ? std::optional<std::uint32_t>(id) : std::nullopt;
  }
  std::optional<std::int32_t> iri_node(const Hierarchy& h, const Term& t) const {
    if (!t.is_iri()) return std::nullopt;
    auto id = h.find(t.lexical);
    return id != Hierarchy::kNone && h.is_element(id) ? std::optional<std::int32_t>(id) : std::nullopt;
  }

  std::optional<std::uint32_t> value_instance(Value v) const {
    return kind_of(v) == kInstance ? std::optional<std::uint32_t>(id_of(v)) : std::nullopt;
  }
  std::optional<std::int32_t> value_node(const Hierarchy& h, ValueKind own, Value v) {
    if (kind_of(v) == own) return static_cast<std::int32_t>(id_of(v));
    auto key = std::make_pair(own, v);
    auto it = node_cache_.find(key);
    if (it != node_cache_.end()) return it->second;
    auto node = iri_node(h, decode(v));
    node_cache_.emplace(key, node);
    return node;
  }
  Value concept_value(std::int32_t node) const { return e_.concept_values_[static_cast<std::size_t>(node)]; }
  Value property_value(std::int32_t node) const { return e_.property_values_[static_cast<std::size_t>(node)]; }

  bool is_type(const QueryTerm& p) const { return !p.is_var && p.term.is_iri() && p.term.lexical == vocab::kRdfType; }

  // ---- semantic check -----------------------------------------------------

  bool constant_satisfiable(const PatternTriple& t) const {
    if (!t.s.is_var) {
      auto id = term_instance(t.s.term);
      if (!id || st_.instance(*id).as_subject == 0) return false;
    }
    if (!t.p.is_var) {
      auto node = iri_node(properties_, t.p.term);
      if (!node || st_.property_entailed[static_cast<std::size_t>(*node)] == 0) return false;
    }
    if (!t.o.is_var) {
      auto concept_ok = [&] {
        auto node = iri_node(concepts_, t.o.term);
        return node && st_.concept_entailed[static_cast<std::size_t>(*node)] > 0;
      };
      auto instance_ok = [&] {
        auto id = term_instance(t.o.term);
        return id && st_.instance(*id).as_object > 0;
      };
      if (is_type(t.p)) return concept_ok();
      if (!t.p.is_var) return instance_ok();
      return concept_ok() || instance_ok();
    }
    return true;
  }

  bool group_satisfiable(const GroupPattern& g) const {
    for (const auto& e : g.elements)
      if (e.kind == PatternElement::Kind::Triple && !constant_satisfiable(e.triple)) return false;
    return true;
  }

  // ---- probing ------------------------------------------------------------

  struct Slot {
    bool free = true;
    std::size_t var = 0;
    bool is_var = false;
  };

  std::vector<PrefixCode> property_prefixes(std::int32_t node) const {
    if (rdfs_) return properties_.expansion(node);
    return {properties_.node(node).self_code};
  }
  std::vector<PrefixCode> concept_prefixes(std::int32_t node) const {
    if (rdfs_) return concepts_.expansion(node);
    return {concepts_.node(node).self_code};
  }

  // All solutions (s, p, o values) of one pattern under the bindings of `row`.
  void probe(const PatternTriple& t, const Row& row, std::vector<std::array<Value, 3>>& out) {
    auto bound = [&](const QueryTerm& q) -> std::optional<Value> {
      if (!q.is_var) return std::nullopt;
      Value v = row[vars_.at(q.var)];
      return v == kUnbound ? std::nullopt : std::optional<Value>(v);
    };

    // Subject.
    std::optional<std::uint32_t> s;
    bool s_fixed = !t.s.is_var || bound(t.s);
    if (!t.s.is_var) s = term_instance(t.s.term);
    else if (auto v = bound(t.s)) s = value_instance(*v);
    if (s_fixed && !s) return;

    // Predicate.
    std::optional<std::int32_t> p;
    bool p_fixed = !t.p.is_var || bound(t.p);
    if (!t.p.is_var) p = iri_node(properties_, t.p.term);
    else if (auto v = bound(t.p)) p = value_node(properties_, kProperty, *v);
    if (p_fixed && !p) return;
    bool type_mode = p && *p == db_.ontology().type_property();

    // Object.
    std::optional<std::int32_t> oc;
    std::optional<std::uint32_t> oi;
    bool o_fixed = !t.o.is_var || bound(t.o);
    if (o_fixed) {
      if (!p || type_mode) {
        if (!t.o.is_var) oc = iri_node(concepts_, t.o.term);
        else oc = value_node(concepts_, kConcept, *bound(t.o));
      }
      if (!p || !type_mode) {
        if (!t.o.is_var) oi = term_instance(t.o.term);
        else oi = value_instance(*bound(t.o));
      }
      if (!oc && !oi) return;
    }

    std::vector<std::optional<PrefixCode>> p_slots;
    if (p) {
      for (const auto& c : property_prefixes(*p)) p_slots.emplace_back(c);
    } else {
      p_slots.emplace_back(std::nullopt);
    }
    std::vector<ObjectSlot> o_slots;
    if (!o_fixed) {
      o_slots.push_back(ObjectSlot::any());
    } else {
      if (oc)
        for (const auto& c : concept_prefixes(*oc)) o_slots.push_back(ObjectSlot::concept_prefix(c));
      if (oi) o_slots.push_back(ObjectSlot::instance(*oi));
    }

    Value s_value = s ? make_value(kInstance, *s) : kUnbound;
    Value p_value = p ? property_value(*p) : kUnbound;
    Value o_value = kUnbound;
    if (o_fixed) o_value = !t.o.is_var ? constant_value(t.o.term) : *bound(t.o);

    std::set<std::array<Value, 3>> seen;
    EncodedTriple et;
    for (const auto& ps : p_slots) {
      for (const auto& os : o_slots) {
        if (os.kind == ObjectSlot::Kind::Concept && ps && !ps->is_prefix_of(Ontology::type_code())) continue;
        TriplePattern pattern{s, ps, os};
        ++stats_.store_probes;
        Cursor cur = store_.resolve(pattern);
        while (cur.next(et)) {
          Value sv = s ? s_value : make_value(kInstance, et.s);
          std::vector<Value> pvs, ovs;
          if (p) {
            pvs.push_back(p_value);
          } else {
            auto node = properties_.find_code(et.p);
            if (rdfs_)
              for (auto a : properties_.ancestors(node)) pvs.push_back(property_value(a));
            else
              pvs.push_back(property_value(node));
          }
          if (o_fixed) {
            ovs.push_back(o_value);
          } else if (et.is_concept) {
            auto node = concepts_.find_code(et.oc);
            if (rdfs_)
              for (auto a : concepts_.ancestors(node)) ovs.push_back(concept_value(a));
            else
              ovs.push_back(concept_value(node));
          } else {
            ovs.push_back(make_value(kInstance, et.oi));
          }
          for (Value pv : pvs)
            for (Value ov : ovs)
              if (seen.insert({sv, pv, ov}).second) out.push_back({sv, pv, ov});
        }
      }
    }
  }

  Value constant_value(const Term& t) const {
    if (auto id = term_instance(t)) return make_value(kInstance, *id);
    if (auto node = iri_node(concepts_, t)) return concept_value(*node);
    if (auto node = iri_node(properties_, t)) return property_value(*node);
    return kUnbound;
  }

  // Extends every row with the solutions of one pattern.
  std::vector<Row> join_pattern(const PatternTriple& t, const std::vector<Row>& rows) {
    std::vector<Row> out;
    std::vector<std::array<Value, 3>> sols;
    const QueryTerm* slots[3] = {&t.s, &t.p, &t.o};
    for (const auto& row : rows) {
      sols.clear();
      probe(t, row, sols);
      for (const auto& sol : sols) {
        Row r = row;
        bool ok = true;
        for (int k = 0; k < 3 && ok; ++k) {
          if (!slots[k]->is_var) continue;
          Value& cell = r[vars_.at(slots[k]->var)];
          if (cell == kUnbound) cell = sol[k];
          else ok = cell == sol[k];
        }
        if (ok) out.push_back(std::move(r));
      }
    }
    stats_.intermediate_rows += out.size();
    return out;
  }

  // ---- planning -----------------------------------------------------------

  double estimate(const PatternTriple& t, const std::set<std::string>& bound) const {
    double n = static_cast<double>(st_.n_triples);
    auto is_bound = [&](const QueryTerm& q) { return !q.is_var || bound.count(q.var); };
    double best = n;
    if (!t.s.is_var) {
      auto id = term_instance(t.s.term);
      best = std::min(best, id ? static_cast<double>(st_.instance(*id).as_subject) : 0.0);
    } else if (bound.count(t.s.var)) {
      best = std::min(best, n / static_cast<double>(std::max<std::uint64_t>(1, st_.n_subjects)));
    }
    if (!t.p.is_var) {
      auto node = iri_node(properties_, t.p.term);
      auto& counts = rdfs_ ? st_.property_entailed : st_.property_direct;
      best = std::min(best, node ? static_cast<double>(counts[static_cast<std::size_t>(*node)]) : 0.0);
    } else if (bound.count(t.p.var)) {
      best = std::min(best, n / static_cast<double>(std::max<std::uint64_t>(1, st_.n_predicates)));
    }
    if (!t.o.is_var) {
      double c = 0;
      if (!t.p.is_var && !is_type(t.p)) {
        auto id = term_instance(t.o.term);
        c = id ? static_cast<double>(st_.instance(*id).as_object) : 0.0;
      } else {
        auto node = iri_node(concepts_, t.o.term);
        auto& counts = rdfs_ ? st_.concept_entailed : st_.concept_direct;
        c = node ? static_cast<double>(counts[static_cast<std::size_t>(*node)]) : 0.0;
        if (auto id = term_instance(t.o.term); id && !is_type(t.p))
          c += static_cast<double>(st_.instance(*id).as_object);
      }
      best = std::min(best, c);
    } else if (bound.count(t.o.var)) {
      best = std::min(best, n / static_cast<double>(std::max<std::uint64_t>(1, st_.n_objects)));
    }
    if (is_bound(t.s) && is_bound(t.p) && is_bound(t.o)) best = std::min(best, 1.0);
    return best;
  }

  static int access_rank(const PatternTriple& t, const std::set<std::string>& bound) {
    auto is_bound = [&](const QueryTerm& q) { return !q.is_var || bound.count(q.var); };
    if (is_bound(t.s)) return 0;
    if (is_bound(t.o)) return 1;
    if (is_bound(t.p)) return 2;
    return 3;
  }

  std::vector<std::size_t> plan(const std::vector<const PatternTriple*>& block, std::set<std::string> bound) const {
    std::vector<std::size_t> order, remaining(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) remaining[i] = i;
    if (!e_.reorder_) return remaining;
    while (!remaining.empty()) {
      auto key = [&](std::size_t i) {
        const PatternTriple& t = *block[i];
        bool connected = bound.empty();
        for (const QueryTerm* q : {&t.s, &t.p, &t.o})
          if (q->is_var && bound.count(q->var)) connected = true;
        if (!t.s.is_var && !t.p.is_var && !t.o.is_var) connected = true;
        return std::make_tuple(connected ? 0 : 1, estimate(t, bound), access_rank(t, bound), i);
      };
      auto best = std::min_element(remaining.begin(), remaining.end(),
                                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      std::size_t pick = *best;
      remaining.erase(best);
      order.push_back(pick);
      for (const QueryTerm* q : {&block[pick]->s, &block[pick]->p, &block[pick]->o})
        if (q->is_var) bound.insert(q->var);
    }
    return order;
  }

  std::string describe(const PatternTriple& t, double est) const {
    auto show = [](const QueryTerm& q) { return q.is_var ? "?" + q.var : q.term.to_ntriples(); };
    return show(t.s) + " " + show(t.p) + " " + show(t.o) + " est=" + std::to_string(static_cast<long long>(est));
  }

  // ---- filters ------------------------------------------------------------

  void collect_filter_vars(const GroupPattern& g) {
    for (const auto& e : g.elements) {
      if (e.kind == PatternElement::Kind::Filter) {
        std::vector<std::string> vs;
        e.filter.variables(vs);
        for (const auto& v : vs) var_index(v);
      }
      for (const auto& sub : e.groups) collect_filter_vars(sub);
    }
  }

  std::optional<Term> operand(const Expr& e, const Row& row) const {
    if (!e.value.is_var) return e.value.term;
    Value v = row[vars_.at(e.value.var)];
    if (v == kUnbound) return std::nullopt;
    return decode(v);
  }

  Truth compare(CompareOp op, const Term& a, const Term& b) const {
    int c;
    auto na = numeric_value(a), nb = numeric_value(b);
    if (na && nb) {
      c = *na < *nb ? -1 : *na > *nb ? 1 : 0;
    } else if (op == CompareOp::Eq || op == CompareOp::Ne) {
      bool eq = a == b;
      return (op == CompareOp::Eq) == eq ? Truth::True : Truth::False;
    } else if (a.is_literal() && b.is_literal() &&
               ((is_plain_string(a) && is_plain_string(b)) || (a.datatype == b.datatype && a.lang == b.lang))) {
      int r = a.lexical.compare(b.lexical);
      c = r < 0 ? -1 : r > 0 ? 1 : 0;
    } else {
      return Truth::Error;
    }
    bool r = false;
    switch (op) {
      case CompareOp::Eq: r = c == 0; break;
      case CompareOp::Ne: r = c != 0; break;
      case CompareOp::Lt: r = c < 0; break;
      case CompareOp::Le: r = c <= 0; break;
      case CompareOp::Gt: r = c > 0; break;
      case CompareOp::Ge: r = c >= 0; break;
    }
    return r ? Truth::True : Truth::False;
  }

  Truth eval(const Expr& e, const Row& row) const {
    switch (e.kind) {
      case Expr::Kind::Or: {
        bool error = false;
        for (const auto& a : e.args) {
          Truth t = eval(a, row);
          if (t == Truth::True) return Truth::True;
          error |= t == Truth::Error;
        }
        return error ? Truth::Error : Truth::False;
      }
      case Expr::Kind::And: {
        bool error = false;
        for (const auto& a : e.args) {
          Truth t = eval(a, row);
          if (t == Truth::False) return Truth::False;
          error |= t == Truth::Error;
        }
        return error ? Truth::Error : Truth::True;
      }
      case Expr::Kind::Not: {
        Truth t = eval(e.args[0], row);
        return t == Truth::Error ? t : t == Truth::True ? Truth::False : Truth::True;
      }
      case Expr::Kind::Bound:
        return row[vars_.at(e.value.var)] != kUnbound ? Truth::True : Truth::False;
      case Expr::Kind::Compare: {
        if (e.args[0].kind != Expr::Kind::Value || e.args[1].kind != Expr::Kind::Value) {
          Truth x = eval(e.args[0], row), y = eval(e.args[1], row);
          if (x == Truth::Error || y == Truth::Error) return Truth::Error;
          return compare(e.op, Term::literal(x == Truth::True ? "true" : "false"),
                         Term::literal(y == Truth::True ? "true" : "false"));
        }
        auto a = operand(e.args[0], row);
        auto b = operand(e.args[1], row);
        if (!a || !b) return Truth::Error;
        return compare(e.op, *a, *b);
      }
      case Expr::Kind::Value: {
        auto t = operand(e, row);
        if (!t || !t->is_literal()) return Truth::Error;
        if (t->datatype == std::string(vocab::kXsd) + "boolean")
          return t->lexical == "true" || t->lexical == "1" ? Truth::True : Truth::False;
        if (auto n = numeric_value(*t)) return *n != 0 && !std::isnan(*n) ? Truth::True : Truth::False;
        if (is_plain_string(*t)) return t->lexical.empty() ? Truth::False : Truth::True;
        return Truth::Error;
      }
    }
    return Truth::Error;
  }

  void apply_filter(const Expr& f, std::vector<Row>& rows) const {
    std::erase_if(rows, [&](const Row& r) { return eval(f, r) != Truth::True; });
  }

  // ---- groups -------------------------------------------------------------

  std::vector<Row> eval_group(const GroupPattern& g, std::vector<Row> rows, bool top) {
    if (!top && !group_satisfiable(g)) return {};
    std::vector<const Expr*> pending;
    for (const auto& e : g.elements)
      if (e.kind == PatternElement::Kind::Filter) pending.push_back(&e.filter);

    std::set<std::string> certain;
    if (!rows.empty())
      for (const auto& [name, idx] : vars_) {
        bool all = std::all_of(rows.begin(), rows.end(), [&](const Row& r) { return r[idx] != kUnbound; });
        if (all) certain.insert(name);
      }
    auto apply_ready = [&] {
      for (auto it = pending.begin(); it != pending.end();) {
        std::vector<std::string> vs;
        (*it)->variables(vs);
        bool ready = std::all_of(vs.begin(), vs.end(), [&](const std::string& v) { return certain.count(v) > 0; });
        if (ready) {
          apply_filter(**it, rows);
          it = pending.erase(it);
        } else {
          ++it;
        }
      }
    };
    apply_ready();

    std::size_t i = 0;
    while (i < g.elements.size()) {
      if (rows.empty()) break;
      const auto& e = g.elements[i];
      if (e.kind == PatternElement::Kind::Filter) {
        ++i;
        continue;
      }
      if (e.kind == PatternElement::Kind::Triple) {
        std::vector<const PatternTriple*> block;
        while (i < g.elements.size() && (g.elements[i].kind == PatternElement::Kind::Triple ||
                                         g.elements[i].kind == PatternElement::Kind::Filter)) {
          if (g.elements[i].kind == PatternElement::Kind::Triple) block.push_back(&g.elements[i].triple);
          ++i;
        }
        for (std::size_t k : plan(block, certain)) {
          const PatternTriple& t = *block[k];
          if (top) stats_.plan.push_back(describe(t, estimate(t, certain)));
          rows = join_pattern(t, rows);
          for (const QueryTerm* q : {&t.s, &t.p, &t.o})
            if (q->is_var) certain.insert(q->var);
          apply_ready();
          if (rows.empty()) break;
        }
        continue;
      }
      switch (e.kind) {
        case PatternElement::Kind::Group:
          rows = eval_group(e.groups[0], std::move(rows), false);
          for (const auto& v : e.groups[0].variables()) certain.insert(v);
          break;
        case PatternElement::Kind::Union: {
          std::vector<Row> out;
          for (const auto& branch : e.groups) {
            auto part = eval_group(branch, rows, false);
            out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
          }
          rows = std::move(out);
          break;
        }
        case PatternElement::Kind::Optional: {
          std::vector<Row> out;
          for (auto& row : rows) {
            auto ext = eval_group(e.groups[0], {row}, false);
            if (ext.empty()) out.push_back(std::move(row));
            else out.insert(out.end(), std::make_move_iterator(ext.begin()), std::make_move_iterator(ext.end()));
          }
          rows = std::move(out);
          break;
        }
        default:
          break;
      }
      apply_ready();
      ++i;
    }
    for (const Expr* f : pending) apply_filter(*f, rows);
    return rows;
  }

  const QueryEngine& e_;
  const Database& db_;
  const TripleStore& store_;
  const Hierarchy& concepts_;
  const Hierarchy& properties_;
  const InstanceDictionary& dict_;
  const DatasetStats& st_;
  bool rdfs_;
  ExecStats& stats_;
  std::map<std::string, std::size_t> vars_;
  std::vector<std::string> names_;
  std::map<std::pair<ValueKind, Value>, std::optional<std::int32_t>> node_cache_;
};

ResultTable QueryEngine::execute(const Query& query, Entailment entailment, ExecStats* stats) const {
  ExecStats local;
  ExecStats& st = stats ? *stats : local;
  st = ExecStats();
  Evaluator ev(*this, query, entailment, st);
  ResultTable table;
  table.variables = query.output_variables();

  auto rows = ev.run(query.where);
  if (!rows) {
    st.unsatisfiable = true;
    return table;
  }

  std::vector<std::size_t> proj;
  for (const auto& v : table.variables) proj.push_back(ev.var_index(v));

  if (!query.order_by.empty()) {
    std::vector<std::pair<std::size_t, bool>> keys;
    for (const auto& k : query.order_by) keys.emplace_back(ev.var_index(k.var), k.descending);
    std::map<Value, Term> cache;
    auto term_of = [&](Value v) -> std::optional<Term> {
      if (v == kUnbound) return std::nullopt;
      auto it = cache.find(v);
      if (it == cache.end()) it = cache.emplace(v, ev.decode(v)).first;
      return it->second;
    };
    std::stable_sort(rows->begin(), rows->end(), [&](const Row& a, const Row& b) {
      for (auto [idx, desc] : keys) {
        int c = order_compare(term_of(a[idx]), term_of(b[idx]));
        if (c != 0) return desc ? c > 0 : c < 0;
      }
      return false;
    });
  }

  std::vector<Row> projected;
  projected.reserve(rows->size());
  std::unordered_set<Row, RowHash> seen;
  for (const auto& r : *rows) {
    Row p;
    p.reserve(proj.size());
    for (auto idx : proj) p.push_back(r[idx]);
    if (query.distinct && !seen.insert(p).second) continue;
    projected.push_back(std::move(p));
  }

  std::uint64_t begin = std::min<std::uint64_t>(query.offset, projected.size());
  std::uint64_t end = projected.size();
  if (query.limit) end = std::min<std::uint64_t>(end, begin + *query.limit);
  for (std::uint64_t i = begin; i < end; ++i) {
    std::vector<std::optional<Term>> out;
    for (Value v : projected[i]) out.push_back(v == kUnbound ? std::nullopt : std::optional<Term>(ev.decode(v)));
    table.rows.push_back(std::move(out));
  }
  return table;
}

ResultTable QueryEngine::execute(std::string_view sparql, Entailment entailment, ExecStats* stats) const {
  return execute(parse_sparql(sparql), entailment, stats);
}

std::string format_tsv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.variables.size(); ++i) out += (i ? "\t?" : "?") + table.variables[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      if (row[i]) out += row[i]->to_ntriples();
    }
    out += '\n';
  }
  return out;
}

std::string format_json(const ResultTable& table) {
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i]) continue;
      const Term& t = *row[i];
      nlohmann::json cell;
      switch (t.kind) {
        case TermKind::Iri: cell["type"] = "uri"; break;
        case TermKind::BlankNode: cell["type"] = "bnode"; break;
        case TermKind::Literal: cell["type"] = "literal"; break;
      }
      cell["value"] = t.lexical;
      if (!t.lang.empty()) cell["xml:lang"] = t.lang;
      if (!t.datatype.empty()) cell["datatype"] = t.datatype;
      b[table.variables[i]] = std::move(cell);
    }
    bindings.push_back(std::move(b));
  }
  nlohmann::json doc;
  doc["head"]["vars"] = table.variables;
  doc["results"]["bindings"] = std::move(bindings);
  return doc.dump(2) + "\n";
}

}  // namespace wfwl
