#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "support/datasets.hpp"
#include "support/oracle.hpp"
#include "support/paths.hpp"
#include "wfwl/database.hpp"
#include "wfwl/error.hpp"
#include "wfwl/ingest.hpp"
#include "wfwl/vocabulary.hpp"

using namespace wfwl;
using test::ub;

namespace {

Term iri(std::string_view s) { return Term::iri(std::string(s)); }
Term ex(const std::string& local) { return Term::iri(test::kEx + local); }
RawTriple typed(const Term& s, const std::string& name) { return {s, iri(vocab::kRdfType), iri(ub(name))}; }

std::vector<RawTriple> lubm_tbox() { return parse_ntriples_file(test::data_path("univ-bench.nt")); }

Ontology classify_for(const std::vector<RawTriple>& tbox, const std::vector<RawTriple>& abox) {
  auto v = data_vocabulary(abox);
  return Ontology::classify(tbox, v.concepts, v.properties);
}

std::set<RawTriple> as_set(const std::vector<RawTriple>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("split separates schema from data") {
  auto tbox = lubm_tbox();
  auto sample = parse_ntriples_file(test::data_path("sample.nt"));
  auto sample_split = split_tbox_abox(sample);
  CHECK(sample_split.tbox.empty());
  CHECK(sample_split.abox.size() == 13);

  auto mixed = tbox;
  mixed.insert(mixed.end(), sample.begin(), sample.end());
  auto parts = split_tbox_abox(mixed);
  CHECK(parts.tbox.size() + parts.abox.size() == mixed.size());
  CHECK(as_set(parts.tbox) == as_set(tbox));
  CHECK(as_set(parts.abox) == as_set(sample));

  CHECK(is_schema_triple({ex("A"), iri(vocab::kRdfsSubClassOf), ex("B")}));
  CHECK(is_schema_triple({ex("p"), iri(vocab::kRdfType), iri(vocab::kOwlObjectProperty)}));
  CHECK_FALSE(is_schema_triple({ex("a"), iri(vocab::kRdfType), ex("B")}));
}

TEST_CASE("advisor example adds exactly the two expected typings") {
  auto tbox = lubm_tbox();
  auto abox = parse_ntriples_file(test::data_path("advisor.nt"));
  auto before = as_set(abox);
  auto ontology = classify_for(tbox, abox);
  auto report = materialize_domain_range(abox, ontology);
  CHECK(report.added == 2);
  CHECK(report.removed == 0);
  std::set<RawTriple> added;
  for (const auto& t : abox)
    if (!before.count(t)) added.insert(t);
  CHECK(added == std::set<RawTriple>{typed(ex("smith"), "Person"), typed(ex("gblin"), "Professor")});
}

TEST_CASE("deepest-type rule") {
  auto tbox = lubm_tbox();
  const Term advisor = iri(ub("advisor"));

  SUBCASE("a deeper existing type is kept alone") {
    std::vector<RawTriple> abox{{ex("s"), advisor, ex("p")}, typed(ex("p"), "FullProfessor"), typed(ex("s"), "Student")};
    auto ontology = classify_for(tbox, abox);
    auto before = abox;
    auto report = materialize_domain_range(abox, ontology);
    CHECK(report.added == 0);
    CHECK(as_set(abox) == as_set(before));
  }
  SUBCASE("a strict super-type is superseded") {
    std::vector<RawTriple> abox{{ex("s"), advisor, ex("p")}, typed(ex("p"), "Employee")};
    auto ontology = classify_for(tbox, abox);
    auto report = materialize_domain_range(abox, ontology);
    CHECK(report.added == 2);
    CHECK(report.removed == 1);
    auto out = as_set(abox);
    CHECK(out.count(typed(ex("p"), "Professor")));
    CHECK_FALSE(out.count(typed(ex("p"), "Employee")));
  }
  SUBCASE("superseded types can be kept") {
    std::vector<RawTriple> abox{{ex("s"), advisor, ex("p")}, typed(ex("p"), "Employee")};
    auto ontology = classify_for(tbox, abox);
    auto report = materialize_domain_range(abox, ontology, {false});
    CHECK(report.removed == 0);
    auto out = as_set(abox);
    CHECK(out.count(typed(ex("p"), "Professor")));
    CHECK(out.count(typed(ex("p"), "Employee")));
  }
  SUBCASE("an incomparable type gets a second typing") {
    std::vector<RawTriple> abox{{ex("s"), advisor, ex("p")}, typed(ex("p"), "Student")};
    auto ontology = classify_for(tbox, abox);
    materialize_domain_range(abox, ontology);
    auto out = as_set(abox);
    CHECK(out.count(typed(ex("p"), "Professor")));
    CHECK(out.count(typed(ex("p"), "Student")));
  }
  SUBCASE("properties without domain or range change nothing") {
    std::vector<RawTriple> abox{{ex("s"), iri(ub("headOf")), ex("o")}, {ex("s"), ex("free"), ex("o")}};
    auto ontology = classify_for(tbox, abox);
    // headOf inherits worksFor's domain and range.
    auto report = materialize_domain_range(abox, ontology);
    CHECK(report.added == 2);
    std::vector<RawTriple> free_only{{ex("s"), ex("free"), ex("o")}};
    auto o2 = classify_for(tbox, free_only);
    CHECK(materialize_domain_range(free_only, o2).added == 0);
  }
  SUBCASE("literal objects are not typed by a range") {
    std::vector<RawTriple> abox{{ex("s"), iri(ub("name")), Term::literal("n")}};
    auto ontology = classify_for(tbox, abox);
    CHECK(materialize_domain_range(abox, ontology).added == 0);
  }
}

TEST_CASE("top typings are dropped and literal types rejected") {
  std::vector<RawTriple> abox{{ex("a"), iri(vocab::kRdfType), iri(vocab::kOwlThing)},
                              {ex("a"), iri(vocab::kRdfType), iri(vocab::kRdfsResource)},
                              {ex("a"), iri(vocab::kRdfType), ex("C")}};
  CHECK(drop_top_typings(abox) == 2);
  CHECK(abox.size() == 1);
  std::vector<RawTriple> bad{{ex("a"), iri(vocab::kRdfType), Term::literal("C")}};
  CHECK_THROWS_AS(data_vocabulary(bad), IngestError);
}

TEST_CASE("sample encodes into subject blocks with predicate counts 2 3 4 2 1") {
  auto tbox = lubm_tbox();
  auto abox = parse_ntriples_file(test::data_path("sample.nt"));
  auto ontology = classify_for(tbox, abox);
  CHECK(materialize_domain_range(abox, ontology).added == 0);
  auto built = InstanceDictionary::build(instance_terms(abox), DictPolicy::FirstSeen);
  auto encoded = encode_and_sort(abox, built.ids, ontology);
  CHECK(encoded.size() == 13);
  std::vector<std::uint32_t> subjects;
  std::vector<int> counts;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (i == 0 || encoded[i].s != encoded[i - 1].s) {
      subjects.push_back(encoded[i].s);
      counts.push_back(0);
    }
    if (i == 0 || encoded[i].s != encoded[i - 1].s || encoded[i].p != encoded[i - 1].p) ++counts.back();
  }
  CHECK(counts == std::vector<int>{2, 3, 4, 2, 1});
  // First-seen ids follow the listing.
  CHECK(std::is_sorted(subjects.begin(), subjects.end()));
  CHECK(built.dictionary.decode(subjects[0]) == Term::iri("http://www.Uni0.edu"));
}

TEST_CASE("encoding deduplicates and handles empty input") {
  auto tbox = lubm_tbox();
  std::vector<RawTriple> abox{typed(ex("a"), "Course"), typed(ex("a"), "Course")};
  auto ontology = classify_for(tbox, abox);
  auto built = InstanceDictionary::build(instance_terms(abox), DictPolicy::Sorted);
  CHECK(encode_and_sort(abox, built.ids, ontology).size() == 1);
  std::vector<RawTriple> none;
  auto empty = InstanceDictionary::build(instance_terms(none), DictPolicy::Sorted);
  CHECK(encode_and_sort(none, empty.ids, ontology).empty());
  std::vector<RawTriple> unknown{typed(ex("zzz"), "Course")};
  CHECK_THROWS_AS(encode_and_sort(unknown, built.ids, ontology), IngestError);
}

TEST_CASE("materialization is idempotent, accounted and loses nothing") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 40; ++round) {
    test::RandomConfig config;
    config.max_triples = 500;
    auto data = test::random_dataset(rng, config);
    auto abox = data.abox;
    drop_top_typings(abox);
    auto ontology = classify_for(data.tbox, abox);
    std::sort(abox.begin(), abox.end());
    abox.erase(std::unique(abox.begin(), abox.end()), abox.end());
    auto before = abox;

    auto report = materialize_domain_range(abox, ontology);
    CHECK(abox.size() == before.size() + report.added - report.removed);

    auto once = as_set(abox);
    auto again = abox;
    auto second = materialize_domain_range(again, ontology);
    CHECK(second.added == 0);
    CHECK(second.removed == 0);
    CHECK(as_set(again) == once);

    CHECK(test::rdfs_closure(data.tbox, abox) == test::rdfs_closure(data.tbox, before));
  }
}

TEST_CASE("build then dump reproduces the materialized triples") {
  auto tbox = lubm_tbox();
  auto abox = parse_ntriples_file(test::data_path("advisor.nt"));
  Database db = Database::build(tbox, abox);
  auto expected = abox;
  auto ontology = classify_for(tbox, expected);
  materialize_domain_range(expected, ontology);
  auto dumped = db.dump();
  CHECK(as_set(dumped) == as_set(expected));
  CHECK(dumped.size() == expected.size());

  std::mt19937_64 rng(5);
  for (int round = 0; round < 10; ++round) {
    auto data = test::random_dataset(rng);
    BuildOptions options;
    options.materialize = false;
    Database plain = Database::build(data.tbox, data.abox, options);
    auto input = data.abox;
    drop_top_typings(input);
    CHECK(as_set(plain.dump()) == as_set(input));
  }
}
