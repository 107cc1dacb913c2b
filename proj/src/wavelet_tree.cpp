#include "wfwl/wavelet_tree.hpp"

#include <deque>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"

namespace wfwl {
namespace {

// Walks internal nodes breadth-first (left to right within a depth) and
// assigns each its interval start in its level. When `derive_counts` is set,
// child counts come from the level bits; otherwise count_ is already filled.
// Returns the per-level lengths.
std::vector<std::uint64_t> layout(const CodeTree& tree, const std::vector<BitVector>* levels,
                                  std::vector<std::uint64_t>& begin, std::vector<std::uint64_t>& count,
                                  bool derive_counts) {
  std::vector<std::uint64_t> level_len;
  std::deque<std::int32_t> queue{0};
  while (!queue.empty()) {
    std::int32_t v = queue.front();
    queue.pop_front();
    const auto& node = tree.node(v);
    if (tree.is_leaf(v)) continue;
    unsigned d = node.code.length;
    if (level_len.size() <= d) level_len.resize(d + 1, 0);
    begin[v] = level_len[d];
    level_len[d] += count[v];
    if (derive_counts) {
      if (d >= levels->size()) throw EncodingError("missing wavelet level");
      const BitVector& bits = (*levels)[d];
      std::uint64_t b = begin[v], s = count[v];
      if (b + s > bits.size()) throw EncodingError("wavelet level shorter than its nodes");
      std::uint64_t ones = bits.rank1(b + s) - bits.rank1(b);
      std::uint64_t child_count[2] = {s - ones, ones};
      for (int c = 0; c < 2; ++c) {
        if (node.child[c] != CodeTree::kNone)
          count[node.child[c]] = child_count[c];
        else if (child_count[c] != 0)
          throw EncodingError("wavelet level routes elements to a missing child");
      }
    }
    for (int c = 0; c < 2; ++c)
      if (node.child[c] != CodeTree::kNone) queue.push_back(node.child[c]);
  }
  return level_len;
}

}  // namespace

WaveletTree WaveletTree::build(std::span<const PrefixCode> seq, CodeTree tree) {
  std::vector<std::uint64_t> symbols;
  symbols.reserve(seq.size());
  for (const auto& c : seq) {
    std::int32_t id = tree.find(c);
    if (id == CodeTree::kNone || !tree.is_leaf(id))
      throw EncodingError("code " + c.to_string() + " is not a leaf of the code tree");
    symbols.push_back(static_cast<std::uint64_t>(tree.node(id).symbol));
  }
  return build_from_symbols(symbols, std::move(tree));
}

WaveletTree WaveletTree::build_from_symbols(std::span<const std::uint64_t> seq, CodeTree tree) {
  WaveletTree wt;
  wt.tree_ = std::move(tree);
  wt.size_ = seq.size();
  const CodeTree& t = wt.tree_;
  std::size_t n_nodes = t.node_count();
  wt.begin_.assign(n_nodes, 0);
  wt.count_.assign(n_nodes, 0);

  std::vector<std::int32_t> leaf_of(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::int32_t leaf = t.leaf_of_symbol(seq[i]);
    if (leaf == CodeTree::kNone)
      throw EncodingError("symbol " + std::to_string(seq[i]) + " is not in the code tree");
    leaf_of[i] = leaf;
    ++wt.count_[leaf];
  }
  // Children always have larger ids than their parent.
  std::vector<std::int32_t> parent(n_nodes, CodeTree::kNone);
  for (std::size_t v = 0; v < n_nodes; ++v)
    for (auto c : t.node(static_cast<std::int32_t>(v)).child)
      if (c != CodeTree::kNone) parent[c] = static_cast<std::int32_t>(v);
  for (std::size_t v = n_nodes; v-- > 1;)
    if (parent[v] != CodeTree::kNone) wt.count_[parent[v]] += wt.count_[v];

  auto level_len = layout(t, nullptr, wt.begin_, wt.count_, false);

  std::vector<std::vector<std::uint64_t>> words(level_len.size());
  for (std::size_t d = 0; d < level_len.size(); ++d) words[d].assign((level_len[d] + 63) / 64, 0);
  std::vector<std::uint64_t> cursor(n_nodes, 0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const PrefixCode& code = t.node(leaf_of[i]).code;
    std::int32_t v = 0;
    for (unsigned d = 0; d < code.length; ++d) {
      bool bit = code.bit(d);
      std::uint64_t pos = wt.begin_[v] + cursor[v]++;
      if (bit) words[d][pos / 64] |= std::uint64_t{1} << (pos % 64);
      v = t.node(v).child[bit ? 1 : 0];
    }
  }
  wt.levels_.reserve(level_len.size());
  for (std::size_t d = 0; d < level_len.size(); ++d)
    wt.levels_.emplace_back(std::move(words[d]), static_cast<std::size_t>(level_len[d]));
  return wt;
}

std::int32_t WaveletTree::node_for_path(const PrefixCode& p) const {
  std::int32_t id = tree_.find(p);
  if (id == CodeTree::kNone) throw EncodingError("prefix " + p.to_string() + " is not a path of the code tree");
  return id;
}

std::int32_t WaveletTree::node_for_leaf(const PrefixCode& c) const {
  std::int32_t id = tree_.find(c);
  if (id == CodeTree::kNone || !tree_.is_leaf(id))
    throw EncodingError("code " + c.to_string() + " is not a leaf of the code tree");
  return id;
}

PrefixCode WaveletTree::access(std::size_t i) const {
  std::int32_t v = 0;
  if (i >= size_)
    throw RangeError("wavelet access position " + std::to_string(i) + " out of range [0, " +
                     std::to_string(size_) + ")");
  std::size_t pos = i;
  while (!tree_.is_leaf(v)) {
    const BitVector& bits = levels_[tree_.node(v).code.length];
    std::size_t b = begin_[v];
    bool bit = bits.access(b + pos);
    pos = bits.rank(bit, b + pos) - bits.rank(bit, b);
    v = tree_.node(v).child[bit ? 1 : 0];
  }
  return tree_.node(v).code;
}

std::uint64_t WaveletTree::access_symbol(std::size_t i) const {
  PrefixCode c = access(i);
  return static_cast<std::uint64_t>(tree_.node(tree_.find(c)).symbol);
}

std::size_t WaveletTree::rank_node(const PrefixCode& path, std::size_t i) const {
  if (i > size_)
    throw RangeError("wavelet rank position " + std::to_string(i) + " exceeds length " + std::to_string(size_));
  std::int32_t v = 0;
  std::size_t pos = i;
  for (unsigned d = 0; d < path.length && pos > 0; ++d) {
    const BitVector& bits = levels_[d];
    std::size_t b = begin_[v];
    bool bit = path.bit(d);
    pos = bits.rank(bit, b + pos) - bits.rank(bit, b);
    v = tree_.node(v).child[bit ? 1 : 0];
  }
  return pos;
}

std::size_t WaveletTree::select_node(const PrefixCode& path, std::int32_t node, std::size_t k) const {
  if (k == 0 || k > count_[node])
    throw NotFoundError("wavelet select: occurrence " + std::to_string(k) + " of " + path.to_string() +
                        " does not exist (have " + std::to_string(count_[node]) + ")");
  std::vector<std::int32_t> ancestors(path.length);
  std::int32_t v = 0;
  for (unsigned d = 0; d < path.length; ++d) {
    ancestors[d] = v;
    v = tree_.node(v).child[path.bit(d) ? 1 : 0];
  }
  std::size_t pos = k - 1;
  for (unsigned d = path.length; d-- > 0;) {
    const BitVector& bits = levels_[d];
    std::size_t b = begin_[ancestors[d]];
    bool bit = path.bit(d);
    pos = bits.select(bit, bits.rank(bit, b) + pos + 1) - b;
  }
  return pos;
}

std::size_t WaveletTree::rank(const PrefixCode& c, std::size_t i) const {
  node_for_leaf(c);
  return rank_node(c, i);
}

std::size_t WaveletTree::select(const PrefixCode& c, std::size_t k) const {
  return select_node(c, node_for_leaf(c), k);
}

std::size_t WaveletTree::rank_prefix(const PrefixCode& p, std::size_t i) const {
  node_for_path(p);
  return rank_node(p, i);
}

std::size_t WaveletTree::select_prefix(const PrefixCode& p, std::size_t k) const {
  return select_node(p, node_for_path(p), k);
}

std::size_t WaveletTree::count_prefix(const PrefixCode& p) const {
  std::int32_t id = tree_.find(p);
  return id == CodeTree::kNone ? 0 : static_cast<std::size_t>(count_[id]);
}

std::size_t WaveletTree::size_in_bits() const {
  std::size_t bits = 0;
  for (const auto& l : levels_) bits += l.size() + l.directory_bits();
  return bits;
}

void WaveletTree::serialize(ByteWriter& out) const {
  tree_.serialize(out);
  out.put_u64(size_);
  out.put_varint(levels_.size());
  for (const auto& l : levels_) l.serialize(out);
}

WaveletTree WaveletTree::deserialize(ByteReader& in) {
  WaveletTree wt;
  wt.tree_ = CodeTree::deserialize(in);
  wt.size_ = static_cast<std::size_t>(in.u64());
  std::uint64_t n_levels = in.varint();
  if (n_levels > PrefixCode::kMaxLength) in.fail("too many wavelet levels");
  for (std::uint64_t d = 0; d < n_levels; ++d) wt.levels_.push_back(BitVector::deserialize(in));
  std::size_t n_nodes = wt.tree_.node_count();
  wt.begin_.assign(n_nodes, 0);
  wt.count_.assign(n_nodes, 0);
  wt.count_[0] = wt.size_;
  if (wt.size_ > 0 && wt.tree_.empty()) in.fail("non-empty wavelet tree with empty alphabet");
  try {
    auto level_len = layout(wt.tree_, &wt.levels_, wt.begin_, wt.count_, true);
    if (level_len.size() != wt.levels_.size()) in.fail("wavelet level count mismatch");
    for (std::size_t d = 0; d < wt.levels_.size(); ++d)
      if (wt.levels_[d].size() != level_len[d]) in.fail("wavelet level length mismatch");
  } catch (const EncodingError& e) {
    in.fail(e.what());
  } catch (const RangeError& e) {
    in.fail(e.what());
  }
  return wt;
}

}  // namespace wfwl
