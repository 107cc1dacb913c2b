// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "support/datasets.hpp"
#include "support/oracle.hpp"
#include "support/paths.hpp"
#include "wfwl/bit_vector.hpp"
#include "wfwl/byte_io.hpp"
#include "wfwl/database.hpp"
#include "wfwl/error.hpp"
#include "wfwl/ingest.hpp"
#include "wfwl/query.hpp"
#include "wfwl/vocabulary.hpp"
#include "wfwl/wavelet_tree.hpp"

using namespace wfwl;
using test::ub;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// Answers collected while running the suites, replayed after a round trip.
struct Replay {
  std::vector<std::function<bool()>> checks;
};

Replay g_replay;

std::vector<RawTriple> lubm_tbox() { return parse_ntriples_file(test::data_path("univ-bench.nt")); }

Database reload(const Database& db) { return Database::deserialize(db.serialize()); }

std::vector<test::Row> answer(const Database& db, const std::string& q, Entailment e = Entailment::Rdfs,
                              ExecStats* stats = nullptr) {
  return test::sorted_rows(QueryEngine(db).execute(q, e, stats));
}

// ---- 1 ----------------------------------------------------------------------

Outcome sample_bitmaps() {
  Outcome o;
  BuildOptions options;
  options.policy = DictPolicy::FirstSeen;
  Database db = Database::build_files(test::data_path("univ-bench.nt"), test::data_path("sample.nt"), options);
  const auto& s = db.store();
  o.expect(s.b_p().to_string() == "101001000101", "B_p = " + s.b_p().to_string());
  o.expect(s.b_o().to_string() == "1111111101111", "B_o = " + s.b_o().to_string());
  o.expect(s.b_c().to_string() == "1010010000101", "B_c = " + s.b_c().to_string());
  auto shared = std::make_shared<Database>(std::move(db));
  g_replay.checks.push_back([shared] {
    Database back = reload(*shared);
    return back.store().b_p().to_string() == "101001000101" && back.store().b_o().to_string() == "1111111101111" &&
           back.store().b_c().to_string() == "1010010000101";
  });
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome prefix_codes() {
  Outcome o;
  auto tbox = lubm_tbox();
  Ontology ontology = Ontology::classify(tbox);
  auto check = [&](const Ontology& ont) {
    const auto& h = ont.concepts();
    auto code = [&](const std::string& c) { return h.node(h.find(ub(c))).code.to_string(); };
    auto self = [&](const std::string& c) { return h.node(h.find(ub(c))).self_code.to_string(); };
    Outcome r;
    r.expect(code("Organization") == "00", "Organization = " + code("Organization"));
    r.expect(code("Person") == "01", "Person = " + code("Person"));
    r.expect(code("Work") == "10", "Work = " + code("Work"));
    r.expect(self("Organization") == "00000", "Organization self = " + self("Organization"));
    r.expect(code("Department") == "00001", "Department = " + code("Department"));
    r.expect(code("Professor") == "010101011", "Professor = " + code("Professor"));
    r.expect(h.node(h.find(ub("Professor"))).code.to_sentinel() == 683, "Professor sentinel");
    r.expect(h.node(h.find(ub("Employee"))).code.to_sentinel() == 42, "Employee sentinel");
    return r;
  };
  o = check(ontology);
  ByteWriter c, p, e;
  ontology.serialize_concepts(c);
  ontology.serialize_properties(p);
  ontology.serialize_equivalences(e);
  std::string cb = c.bytes(), pb = p.bytes(), eb = e.bytes();
  g_replay.checks.push_back([cb, pb, eb, check] {
    ByteReader rc(cb), rp(pb), re(eb);
    return check(Ontology::deserialize(rc, rp, re)).ok;
  });
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome materialization() {
  Outcome o;
  std::string qr1 = "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
                    "PREFIX ub: <" + std::string(test::kUb) + ">\n"
                    "SELECT ?x ?y WHERE { ?y rdf:type ub:Department . ?x rdf:type ub:Professor . ?x ub:worksFor ?y . }";
  auto abox = parse_ntriples_file(test::data_path("advisor.nt"));
  BuildReport report;
  Database db = Database::build(lubm_tbox(), abox, {}, &report);
  o.expect(report.materialized == 2, "materialized " + std::to_string(report.materialized));
  std::set<RawTriple> before(abox.begin(), abox.end()), added;
  for (const auto& t : db.dump())
    if (!before.count(t)) added.insert(t);
  const Term type = Term::iri(std::string(vocab::kRdfType));
  std::set<RawTriple> expected{{Term::iri("http://example.org/smith"), type, Term::iri(ub("Person"))},
                               {Term::iri("http://example.org/gblin"), type, Term::iri(ub("Professor"))}};
  o.expect(added == expected, "added triples differ");
  std::vector<test::Row> pair{{Term::iri("http://example.org/gblin"), Term::iri("http://example.org/esipe")}};
  o.expect(answer(db, qr1) == pair, "QR1 answer");

  BuildOptions plain;
  plain.materialize = false;
  Database raw = Database::build(lubm_tbox(), abox, plain);
  o.expect(answer(raw, qr1).empty(), "QR1 without materialization is not empty");

  auto a = std::make_shared<Database>(std::move(db));
  auto b = std::make_shared<Database>(std::move(raw));
  g_replay.checks.push_back([a, b, qr1, pair] { return answer(reload(*a), qr1) == pair && answer(reload(*b), qr1).empty(); });
  return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome oracle_suite() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::size_t comparisons = 0, multi = 0;
  std::vector<std::shared_ptr<Database>> kept;
  for (int round = 0; round < 200; ++round) {
    auto data = test::random_dataset(rng);
    BuildOptions options;
    options.policy = round % 2 ? DictPolicy::Sorted : DictPolicy::FirstSeen;
    Database db = Database::build(data.tbox, data.abox, options);
    for (const auto& n : db.ontology().concepts().nodes()) multi += !n.other_parents.empty();
    auto closure = test::rdfs_closure(data.tbox, data.abox);
    test::CheckLog log;
    test::check_store_routes(db, rng, log);
    test::check_entailed_resolution(db, closure, rng, log);
    comparisons += log.comparisons;
    if (!log.ok()) o.expect(false, "database " + std::to_string(round) + ": " + log.failures.front());

    // Round trip: the reloaded database must pass the same checks.
    Database back = reload(db);
    test::CheckLog again;
    std::mt19937_64 rng2(static_cast<std::uint64_t>(round));
    test::check_store_routes(back, rng2, again);
    test::check_entailed_resolution(back, closure, rng2, again);
    bool same = again.ok() && back.dump() == db.dump();
    g_replay.checks.push_back([same] { return same; });
  }
  o.expect(multi > 0, "no multiple inheritance was generated");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(comparisons) + " comparisons, " + std::to_string(multi) +
              " multiple-inheritance concepts";
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome sds_suite() {
  Outcome o;
  std::mt19937_64 rng(5);
  // Bitvectors: exhaustive up to 2^14, sampled on 10^6.
  for (std::size_t n : {std::size_t{1}, std::size_t{64}, std::size_t{1000}, std::size_t{1} << 14}) {
    for (double density : {0.05, 0.5, 0.95}) {
      std::bernoulli_distribution coin(density);
      std::vector<bool> bits(n);
      for (std::size_t i = 0; i < n; ++i) bits[i] = coin(rng);
      BitVector v(bits);
      std::size_t ones = 0, zeros = 0;
      for (std::size_t i = 0; i < n; ++i) {
        o.expect(v.access(i) == bits[i], "bitvector access");
        o.expect(v.rank1(i) == ones, "bitvector rank1");
        o.expect(v.rank0(i) == zeros, "bitvector rank0");
        if (bits[i]) o.expect(v.select1(++ones) == i, "bitvector select1");
        else o.expect(v.select0(++zeros) == i, "bitvector select0");
      }
    }
  }
  {
    const std::size_t n = 1'000'000;
    std::vector<bool> bits(n);
    std::vector<std::uint32_t> pos1, pos0;
    for (std::size_t i = 0; i < n; ++i) {
      bits[i] = rng() % 3 == 0;
      (bits[i] ? pos1 : pos0).push_back(static_cast<std::uint32_t>(i));
    }
    BitVector v(bits);
    for (int q = 0; q < 100000; ++q) {
      std::size_t i = rng() % n;
      auto r1 = static_cast<std::size_t>(std::lower_bound(pos1.begin(), pos1.end(), i) - pos1.begin());
      o.expect(v.access(i) == bits[i], "large access");
      o.expect(v.rank1(i) == r1, "large rank1");
      o.expect(v.select1(q % pos1.size() + 1) == pos1[q % pos1.size()], "large select1");
      o.expect(v.select0(q % pos0.size() + 1) == pos0[q % pos0.size()], "large select0");
    }
  }

  // Wavelet trees over a hierarchy-shaped code tree and a fixed-width tree.
  auto check_tree = [&](const CodeTree& tree, std::size_t n, bool exhaustive) {
    auto leaves = tree.leaves();
    std::vector<PrefixCode> paths;
    for (const auto& [code, sym] : leaves)
      for (unsigned len = 0; len <= code.length; ++len) paths.push_back(code.prefix(len));
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    std::vector<PrefixCode> seq(n);
    for (auto& c : seq) c = leaves[rng() % leaves.size()].first;
    auto wt = WaveletTree::build(seq, tree);
    std::vector<std::vector<std::uint32_t>> positions(paths.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < paths.size(); ++k)
        if (paths[k].is_prefix_of(seq[i])) positions[k].push_back(static_cast<std::uint32_t>(i));
    auto rank_oracle = [&](std::size_t k, std::size_t i) {
      return static_cast<std::size_t>(std::lower_bound(positions[k].begin(), positions[k].end(), i) - positions[k].begin());
    };
    if (exhaustive) {
      for (std::size_t i = 0; i < n; ++i) o.expect(wt.access(i) == seq[i], "wavelet access");
      for (std::size_t k = 0; k < paths.size(); ++k) {
        for (std::size_t i = 0; i <= n; ++i) o.expect(wt.rank_prefix(paths[k], i) == rank_oracle(k, i), "wavelet rank");
        for (std::size_t j = 0; j < positions[k].size(); ++j)
          o.expect(wt.select_prefix(paths[k], j + 1) == positions[k][j], "wavelet select");
      }
    } else {
      for (int q = 0; q < 100000; ++q) {
        std::size_t i = rng() % (n + 1), k = rng() % paths.size();
        if (i < n) o.expect(wt.access(i) == seq[i], "wavelet access (sampled)");
        o.expect(wt.rank_prefix(paths[k], i) == rank_oracle(k, i), "wavelet rank (sampled)");
        if (!positions[k].empty()) {
          std::size_t j = rng() % positions[k].size();
          o.expect(wt.select_prefix(paths[k], j + 1) == positions[k][j], "wavelet select (sampled)");
        }
      }
    }
    ByteWriter w;
    wt.serialize(w);
    std::string bytes = w.bytes();
    g_replay.checks.push_back([bytes, wt] {
      ByteReader r(bytes);
      return WaveletTree::deserialize(r) == wt;
    });
  };
  const Ontology lubm = Ontology::classify(lubm_tbox());
  check_tree(lubm.concepts().leaf_tree(), std::size_t{1} << 14, true);
  check_tree(lubm.properties().leaf_tree(), 4000, true);
  check_tree(CodeTree::fixed_width(CodeTree::width_for(5000), 1, 5000), 1'000'000, false);
  check_tree(lubm.concepts().leaf_tree(), 1'000'000, false);
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome lubm_suite() {
  Outcome o;
  auto tbox = lubm_tbox();
  auto abox = test::lubm_dataset(50000);
  std::string raw = test::write_ntriples(abox);
  auto db = std::make_shared<Database>(Database::build(tbox, abox));
  auto closure = test::rdfs_closure(tbox, abox);
  std::ostringstream sizes;
  for (const auto& [n, text] : test::lubm_queries()) {
    auto got = answer(*db, text);
    auto expected = test::naive_query(closure, text);
    o.expect(got == expected, "query " + std::to_string(n) + ": " + std::to_string(got.size()) + " rows, expected " +
                                  std::to_string(expected.size()));
    o.expect(!expected.empty(), "query " + std::to_string(n) + " has no answers");
    sizes << " q" << n << "=" << got.size();
    g_replay.checks.push_back([db, text, expected] { return answer(reload(*db), text) == expected; });
  }
  std::string bytes = db->serialize();
  double ratio = static_cast<double>(bytes.size()) / static_cast<double>(raw.size());
  o.expect(ratio <= 0.35, "container is " + std::to_string(ratio * 100) + "% of the N-Triples size");

  // The info command reports every section.
  std::string path = "/tmp/wfwl_acceptance_lubm.db";
  db->save(path);
  std::ostringstream out, err;
  const char* argv[] = {"wfwl", "info", "--db", path.c_str()};
  int code = cli::run(4, argv, out, err);
  o.expect(code == 0, "info failed: " + err.str());
  for (const char* name : {"dict", "concept_tree", "property_tree", "equivalences", "stats", "B_p", "WT_p", "B_o",
                           "B_c", "WT_oc", "WT_oi"})
    o.expect(out.str().find(std::string("section.") + name + "\t") != std::string::npos,
             std::string("info lacks section ") + name);

  std::ostringstream d;
  d << abox.size() << " triples, " << db->store().n_triples() << " stored, container " << bytes.size() << " B = "
    << static_cast<int>(ratio * 1000) / 10.0 << "% of " << raw.size() << " B;" << sizes.str();
  o.detail = o.ok ? d.str() : o.detail + "; " + d.str();
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome short_circuit() {
  Outcome o;
  auto db = std::make_shared<Database>(
      Database::build_files(test::data_path("univ-bench.nt"), test::data_path("sample.nt")));
  std::string q = "SELECT ?x WHERE { ?x <" + std::string(vocab::kRdfType) + "> <" + ub("University") +
                  "> . ?x <http://unknown.example.org/p> ?y }";
  auto run = [q](const Database& d) {
    ExecStats stats;
    auto rows = QueryEngine(d).execute(q, Entailment::Rdfs, &stats).rows;
    return rows.empty() && stats.unsatisfiable && stats.store_probes == 0;
  };
  o.expect(run(*db), "unknown IRI reached the store");
  g_replay.checks.push_back([db, run] { return run(reload(*db)); });
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Outcome round_trip() {
  Outcome o;
  std::size_t failed = 0;
  for (auto& check : g_replay.checks) failed += !check();
  o.expect(failed == 0, std::to_string(failed) + " of " + std::to_string(g_replay.checks.size()) + " replays differ");
  Database db = Database::build_files(test::data_path("univ-bench.nt"), test::data_path("sample.nt"));
  std::string bytes = db.serialize();
  for (std::size_t i = 0; i < 8; ++i) {
    std::string copy = bytes;
    copy[i] = static_cast<char>(copy[i] ^ 0x20);
    bool rejected = false;
    try {
      Database::deserialize(copy);
    } catch (const FormatError&) {
      rejected = true;
    }
    o.expect(rejected, "header byte " + std::to_string(i) + " corruption accepted");
  }
  if (o.ok) o.detail = std::to_string(g_replay.checks.size()) + " replays identical, header corruption rejected";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
    double limit_s;
  };
  const Criterion criteria[] = {
      {1, "worked-example bitmaps", sample_bitmaps, 1},
      {2, "prefix-code fixtures", prefix_codes, 1},
      {3, "domain/range materialization", materialization, 1},
      {4, "oracle equivalence suite", oracle_suite, 300},
      {5, "succinct structure oracles", sds_suite, 120},
      {6, "LUBM-shaped queries and size", lubm_suite, 120},
      {7, "unsatisfiability short-circuit", short_circuit, 1},
      {8, "serialization round trip", round_trip, 0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.limit_s > 0 && seconds > c.limit_s) {
      o.ok = false;
      o.detail += " (over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit)";
    }
    failures += !o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " [" << seconds << " s]"
              << (o.detail.empty() ? "" : " - " + o.detail) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
