#include "wfwl/dictionary.hpp"

#include <algorithm>
#include <numeric>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"

namespace wfwl {
namespace {

std::size_t common_prefix(std::string_view a, std::string_view b) {
  std::size_t n = std::min(a.size(), b.size()), i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::string_view data, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64 && pos < data.size(); shift += 7) {
    auto b = static_cast<std::uint8_t>(data[pos++]);
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) return v;
  }
  throw FormatError("bad varint in dictionary block", pos);
}

}  // namespace

std::string_view to_string(DictPolicy p) { return p == DictPolicy::Sorted ? "sorted" : "first_seen"; }

DictPolicy dict_policy_from_string(std::string_view s) {
  if (s == "sorted") return DictPolicy::Sorted;
  if (s == "first_seen") return DictPolicy::FirstSeen;
  throw Error("unknown dictionary policy '" + std::string(s) + "'");
}

InstanceDictionary::Built InstanceDictionary::build(std::span<const Term> terms, DictPolicy policy) {
  Built out;
  std::vector<std::string> strings;
  for (const auto& t : terms) {
    std::string s = t.to_ntriples();
    if (out.ids.emplace(s, 0).second) strings.push_back(std::move(s));
  }
  if (policy == DictPolicy::Sorted) std::sort(strings.begin(), strings.end());

  InstanceDictionary& d = out.dictionary;
  d.policy_ = policy;
  d.count_ = strings.size();
  std::string_view prev;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const std::string& s = strings[i];
    out.ids[s] = static_cast<std::uint32_t>(i + 1);
    if (i % kBlockSize == 0) {
      put_varint(d.data_, s.size());
      d.data_ += s;
    } else {
      std::size_t lcp = common_prefix(prev, s);
      put_varint(d.data_, lcp);
      put_varint(d.data_, s.size() - lcp);
      d.data_.append(s, lcp, std::string::npos);
    }
    prev = s;
  }
  d.index_blocks();
  d.build_order();
  return out;
}

void InstanceDictionary::index_blocks() {
  block_offsets_.clear();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count_; ++i) {
    if (i % kBlockSize == 0) {
      block_offsets_.push_back(static_cast<std::uint32_t>(pos));
      std::uint64_t len = get_varint(data_, pos);
      pos += len;
    } else {
      get_varint(data_, pos);
      std::uint64_t len = get_varint(data_, pos);
      pos += len;
    }
    if (pos > data_.size()) throw FormatError("dictionary entry exceeds data", pos);
  }
  if (pos != data_.size()) throw FormatError("trailing bytes in dictionary data", pos);
}

void InstanceDictionary::build_order() {
  order_.clear();
  if (policy_ != DictPolicy::FirstSeen) return;
  std::vector<std::string> all(count_);
  for (std::size_t i = 0; i < count_; ++i) all[i] = decode_canonical(static_cast<std::uint32_t>(i + 1));
  order_.resize(count_);
  std::iota(order_.begin(), order_.end(), 1u);
  std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return all[a - 1] < all[b - 1]; });
}

std::string InstanceDictionary::decode_canonical(std::uint32_t id) const {
  if (id == 0 || id > count_)
    throw RangeError("dictionary id " + std::to_string(id) + " out of range [1, " + std::to_string(count_) + "]");
  std::size_t index = id - 1;
  std::size_t pos = block_offsets_[index / kBlockSize];
  std::string s;
  std::uint64_t len = get_varint(data_, pos);
  s.assign(data_, pos, len);
  pos += len;
  for (std::size_t i = 1; i <= index % kBlockSize; ++i) {
    std::uint64_t lcp = get_varint(data_, pos);
    std::uint64_t suffix = get_varint(data_, pos);
    s.resize(lcp);
    s.append(data_, pos, suffix);
    pos += suffix;
  }
  return s;
}

Term InstanceDictionary::decode(std::uint32_t id) const { return Term::from_ntriples(decode_canonical(id)); }

int InstanceDictionary::compare_id(std::uint32_t id, std::string_view key) const {
  return decode_canonical(id).compare(key);
}

std::uint32_t InstanceDictionary::encode_canonical(std::string_view key) const {
  if (count_ == 0) return kAbsent;
  if (policy_ == DictPolicy::FirstSeen) {
    auto it = std::lower_bound(order_.begin(), order_.end(), key,
                               [&](std::uint32_t id, std::string_view k) { return compare_id(id, k) < 0; });
    if (it != order_.end() && compare_id(*it, key) == 0) return *it;
    return kAbsent;
  }
  // Last block whose head is <= key.
  std::size_t lo = 0, hi = block_offsets_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (compare_id(static_cast<std::uint32_t>(mid * kBlockSize + 1), key) <= 0)
      lo = mid;
    else
      hi = mid;
  }
  std::size_t first = lo * kBlockSize + 1;
  std::size_t last = std::min(count_, first + kBlockSize - 1);
  std::size_t pos = block_offsets_[lo];
  std::string s;
  for (std::size_t id = first; id <= last; ++id) {
    if (id == first) {
      std::uint64_t len = get_varint(data_, pos);
      s.assign(data_, pos, len);
      pos += len;
    } else {
      std::uint64_t lcp = get_varint(data_, pos);
      std::uint64_t suffix = get_varint(data_, pos);
      s.resize(lcp);
      s.append(data_, pos, suffix);
      pos += suffix;
    }
    int c = s.compare(key);
    if (c == 0) return static_cast<std::uint32_t>(id);
    if (c > 0) break;
  }
  return kAbsent;
}

void InstanceDictionary::serialize(ByteWriter& out) const {
  out.put_u8(static_cast<std::uint8_t>(policy_));
  out.put_varint(count_);
  out.put_varint(kBlockSize);
  out.put_string(data_);
}

InstanceDictionary InstanceDictionary::deserialize(ByteReader& in) {
  InstanceDictionary d;
  std::uint8_t policy = in.u8();
  if (policy > 1) in.fail("unknown dictionary policy");
  d.policy_ = static_cast<DictPolicy>(policy);
  d.count_ = static_cast<std::size_t>(in.varint());
  if (in.varint() != kBlockSize) in.fail("unsupported dictionary block size");
  std::uint64_t at = in.offset();
  d.data_ = in.string();
  if (d.count_ > d.data_.size()) in.fail("dictionary term count exceeds data");
  try {
    d.index_blocks();
    d.build_order();
  } catch (const FormatError& e) {
    throw FormatError(e.what(), at + e.offset());
  }
  return d;
}

DatasetStats::InstanceCounts DatasetStats::instance(std::uint32_t id) const {
  InstanceCounts c;
  if (id < subject_occ.size()) c.as_subject = subject_occ[id];
  if (id < object_occ.size()) c.as_object = object_occ[id];
  return c;
}

namespace {

template <typename T>
void put_array(ByteWriter& out, const std::vector<T>& v) {
  out.put_varint(v.size());
  for (auto x : v) out.put_varint(x);
}

template <typename T>
std::vector<T> get_array(ByteReader& in) {
  std::uint64_t n = in.varint();
  if (n > in.remaining()) in.fail("array length exceeds section");
  std::vector<T> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = static_cast<T>(in.varint());
  return v;
}

}  // namespace

void DatasetStats::serialize(ByteWriter& out) const {
  for (auto v : {n_triples, n_subjects, n_objects, n_predicates, n_type_triples, n_materialized, n_superseded})
    out.put_varint(v);
  put_array(out, subject_occ);
  put_array(out, object_occ);
  put_array(out, concept_direct);
  put_array(out, concept_entailed);
  put_array(out, property_direct);
  put_array(out, property_entailed);
}

DatasetStats DatasetStats::deserialize(ByteReader& in) {
  DatasetStats s;
  for (auto* v : {&s.n_triples, &s.n_subjects, &s.n_objects, &s.n_predicates, &s.n_type_triples,
                  &s.n_materialized, &s.n_superseded})
    *v = in.varint();
  s.subject_occ = get_array<std::uint32_t>(in);
  s.object_occ = get_array<std::uint32_t>(in);
  s.concept_direct = get_array<std::uint64_t>(in);
  s.concept_entailed = get_array<std::uint64_t>(in);
  s.property_direct = get_array<std::uint64_t>(in);
  s.property_entailed = get_array<std::uint64_t>(in);
  return s;
}

}  // namespace wfwl
