#include <map>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"
#include "wfwl/wavelet_tree.hpp"

using wfwl::CodeTree;
using wfwl::PrefixCode;
using wfwl::WaveletTree;

namespace {

PrefixCode pc(const char* s) { return PrefixCode::from_string(s); }

// Property codes for the five predicates of the worked example when no
// schema is given: rdf:type, one datatype property, three object properties.
const PrefixCode kType = pc("00");
const PrefixCode kName = pc("011");
const PrefixCode kSubOrg = pc("1001");
const PrefixCode kTeacherOf = pc("1010");
const PrefixCode kWorksFor = pc("1011");

CodeTree sample_property_tree() {
  std::vector<std::pair<PrefixCode, std::uint64_t>> leaves{
      {kType, 0}, {kName, 1}, {kSubOrg, 2}, {kTeacherOf, 3}, {kWorksFor, 4}};
  return CodeTree::from_leaves(leaves);
}

// Predicate nodes of the worked example in pre-order.
std::vector<PrefixCode> sample_predicates() {
  return {kType, kName, kType, kName, kSubOrg, kType, kName, kTeacherOf, kWorksFor, kType, kName, kType};
}

// Plain-array oracles.
std::size_t naive_rank_prefix(const std::vector<PrefixCode>& seq, const PrefixCode& p, std::size_t i) {
  std::size_t r = 0;
  for (std::size_t j = 0; j < i; ++j) r += p.is_prefix_of(seq[j]);
  return r;
}

std::optional<std::size_t> naive_select_prefix(const std::vector<PrefixCode>& seq, const PrefixCode& p,
                                               std::size_t k) {
  for (std::size_t j = 0; j < seq.size(); ++j)
    if (p.is_prefix_of(seq[j]) && --k == 0) return j;
  return std::nullopt;
}

// Random code tree: repeatedly split a random leaf into one or two children.
CodeTree random_tree(std::mt19937_64& rng, std::size_t max_leaves, unsigned max_depth,
                     std::vector<PrefixCode>& internal_paths) {
  std::vector<PrefixCode> leaves{PrefixCode()};
  std::size_t target = 1 + rng() % max_leaves;
  internal_paths.clear();
  for (int guard = 0; leaves.size() < target && guard < 10000; ++guard) {
    std::size_t pick = rng() % leaves.size();
    PrefixCode c = leaves[pick];
    if (c.length >= max_depth) continue;
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    internal_paths.push_back(c);
    switch (rng() % 4) {
      case 0: leaves.push_back(c.append(0, 1)); break;
      case 1: leaves.push_back(c.append(1, 1)); break;
      default:
        leaves.push_back(c.append(0, 1));
        leaves.push_back(c.append(1, 1));
    }
  }
  std::vector<std::pair<PrefixCode, std::uint64_t>> entries;
  for (std::size_t i = 0; i < leaves.size(); ++i) entries.emplace_back(leaves[i], i * 3 + 1);
  return CodeTree::from_leaves(entries);
}

}  // namespace

TEST_CASE("wavelet tree over the worked example predicates") {
  auto seq = sample_predicates();
  auto wt = WaveletTree::build(seq, sample_property_tree());
  REQUIRE(wt.size() == 12);
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(wt.access(i) == seq[i]);

  SUBCASE("access") {
    CHECK(wt.access(0) == kType);
    CHECK(wt.access(7) == kTeacherOf);
    CHECK_THROWS_AS(wt.access(12), wfwl::RangeError);
  }
  SUBCASE("rank") {
    CHECK(wt.rank(kType, 12) == naive_rank_prefix(seq, kType, 12));
    CHECK(wt.rank(kType, 12) == 5);
    CHECK(wt.rank(kWorksFor, 0) == 0);
    // The two teacherOf triples share a single predicate node.
    CHECK(wt.rank(kTeacherOf, 12) == naive_rank_prefix(seq, kTeacherOf, 12));
    CHECK(wt.rank(kTeacherOf, 12) == 1);
    CHECK_THROWS_AS(wt.rank(pc("10"), 12), wfwl::EncodingError);
    CHECK_THROWS_AS(wt.rank(kType, 13), wfwl::RangeError);
  }
  SUBCASE("select") {
    CHECK(wt.select(kTeacherOf, 1) == 7);
    CHECK(wt.select(kType, 1) == 0);
    CHECK(wt.select(kWorksFor, 1) == 8);
    CHECK_THROWS_AS(wt.select(kTeacherOf, 2), wfwl::NotFoundError);
  }
  SUBCASE("prefix variants") {
    auto object_props = pc("10");
    CHECK(wt.rank_prefix(object_props, 12) == naive_rank_prefix(seq, object_props, 12));
    CHECK(wt.rank_prefix(object_props, 12) == 3);
    CHECK(wt.rank_prefix(PrefixCode(), 12) == 12);
    CHECK(wt.rank_prefix(kType, 9) == wt.rank(kType, 9));
    CHECK(wt.select_prefix(object_props, 2) == 7);
    CHECK(wt.select_prefix(kName, 3) == wt.select(kName, 3));
    CHECK_THROWS_AS(wt.select_prefix(object_props, 4), wfwl::NotFoundError);
    CHECK_THROWS_AS(wt.rank_prefix(pc("11"), 3), wfwl::EncodingError);
  }
}

TEST_CASE("wavelet build rejects non-leaf codes") {
  std::vector<PrefixCode> seq{kType, pc("10")};
  CHECK_THROWS_AS(WaveletTree::build(seq, sample_property_tree()), wfwl::EncodingError);
  std::vector<PrefixCode> none;
  auto empty = WaveletTree::build(none, sample_property_tree());
  CHECK(empty.size() == 0);
  CHECK(empty.rank(kType, 0) == 0);
  CHECK(empty.rank_prefix(PrefixCode(), 0) == 0);
}

TEST_CASE("random code trees agree with plain-array oracles") {
  std::mt19937_64 rng(42);
  std::vector<PrefixCode> internal;
  for (int round = 0; round < 60; ++round) {
    bool small = round < 40;
    CodeTree tree = random_tree(rng, small ? 12 : 256, small ? 6 : 16, internal);
    auto leaves = tree.leaves();
    std::size_t n = small ? rng() % 200 : 1 + rng() % 100000;
    std::vector<PrefixCode> seq(n);
    for (auto& c : seq) c = leaves[rng() % leaves.size()].first;
    auto wt = WaveletTree::build(seq, tree);

    std::vector<PrefixCode> paths = internal;
    for (const auto& [code, sym] : leaves) paths.push_back(code);

    if (small) {
      // Exhaustive over positions, paths and ordinals.
      for (std::size_t i = 0; i < n; ++i) REQUIRE(wt.access(i) == seq[i]);
      for (const auto& p : paths) {
        std::size_t r = 0;
        for (std::size_t i = 0; i <= n; ++i) {
          REQUIRE(wt.rank_prefix(p, i) == r);
          if (i < n && p.is_prefix_of(seq[i])) {
            REQUIRE(wt.select_prefix(p, r + 1) == i);
            ++r;
          }
        }
        REQUIRE(wt.count_prefix(p) == r);
        CHECK_THROWS_AS(wt.select_prefix(p, r + 1), wfwl::NotFoundError);
      }
      // Additivity: prefix rank is the sum over the leaves below it.
      for (const auto& p : internal) {
        for (std::size_t i : {std::size_t{0}, n / 2, n}) {
          std::size_t sum = 0;
          for (const auto& [code, sym] : leaves)
            if (p.is_prefix_of(code)) sum += wt.rank(code, i);
          REQUIRE(wt.rank_prefix(p, i) == sum);
        }
      }
    } else {
      for (int q = 0; q < 2000; ++q) {
        std::size_t i = rng() % n;
        REQUIRE(wt.access(i) == seq[i]);
        const auto& p = paths[rng() % paths.size()];
        std::size_t pos = rng() % (n + 1);
        std::size_t r = wt.rank_prefix(p, pos);
        REQUIRE(r == naive_rank_prefix(seq, p, pos));
        if (i < n && p.is_prefix_of(seq[i])) REQUIRE(wt.select_prefix(p, wt.rank_prefix(p, i) + 1) == i);
        std::size_t total = wt.count_prefix(p);
        if (total > 0) {
          std::size_t k = rng() % total + 1;
          REQUIRE(wt.select_prefix(p, k) == *naive_select_prefix(seq, p, k));
        }
      }
    }
  }
}

TEST_CASE("wavelet serialization round trip") {
  std::mt19937_64 rng(9);
  std::vector<PrefixCode> internal;
  CodeTree tree = random_tree(rng, 40, 10, internal);
  auto leaves = tree.leaves();
  std::vector<PrefixCode> seq(5000);
  for (auto& c : seq) c = leaves[rng() % leaves.size()].first;
  auto wt = WaveletTree::build(seq, tree);
  wfwl::ByteWriter w;
  wt.serialize(w);
  wfwl::ByteReader r(w.bytes());
  auto back = WaveletTree::deserialize(r);
  CHECK(r.at_end());
  CHECK(back == wt);
  for (std::size_t i = 0; i < seq.size(); i += 97) CHECK(back.access(i) == seq[i]);
  wfwl::ByteWriter again;
  back.serialize(again);
  CHECK(again.bytes() == w.bytes());

  auto fixed = WaveletTree::build_from_symbols(std::vector<std::uint64_t>{5, 1, 9, 5, 3}, CodeTree::fixed_width(4, 1, 9));
  CHECK(fixed.access_symbol(2) == 9);
  CHECK(fixed.rank(PrefixCode(5, 4), 5) == 2);
  wfwl::ByteWriter fw;
  fixed.serialize(fw);
  wfwl::ByteReader fr(fw.bytes());
  CHECK(WaveletTree::deserialize(fr) == fixed);
}
