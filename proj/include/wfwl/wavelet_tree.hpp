#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wfwl/bit_vector.hpp"
#include "wfwl/code_tree.hpp"
#include "wfwl/prefix_code.hpp"

namespace wfwl {

/// Pointer-free wavelet tree over an arbitrary (possibly unbalanced) code
/// tree. Level d stores, for every element whose code is longer than d, its
/// d-th code bit; elements are grouped by tree node left to right, and each
/// internal node owns a contiguous interval of its level.
///
/// Besides access/rank/select on leaf symbols, rank_prefix/select_prefix
/// stop the traversal at the depth of an arbitrary tree path, counting every
/// element whose code starts with that path.
class WaveletTree {
 public:
  WaveletTree() = default;

  /// Throws EncodingError if an element is not a leaf code of `tree`.
  static WaveletTree build(std::span<const PrefixCode> seq, CodeTree tree);
  /// Same, with elements given as leaf symbols.
  static WaveletTree build_from_symbols(std::span<const std::uint64_t> seq, CodeTree tree);

  std::size_t size() const { return size_; }
  const CodeTree& code_tree() const { return tree_; }

  PrefixCode access(std::size_t i) const;
  std::uint64_t access_symbol(std::size_t i) const;

  /// Occurrences of leaf `c` in [0, i).
  std::size_t rank(const PrefixCode& c, std::size_t i) const;
  /// Position of the k-th (1-based) occurrence of leaf `c`.
  std::size_t select(const PrefixCode& c, std::size_t k) const;

  /// Elements in [0, i) whose code starts with path `p`.
  std::size_t rank_prefix(const PrefixCode& p, std::size_t i) const;
  /// Position of the k-th element whose code starts with `p`.
  std::size_t select_prefix(const PrefixCode& p, std::size_t k) const;

  /// Total occurrences under `p`; 0 when `p` is not a path.
  std::size_t count_prefix(const PrefixCode& p) const;
  bool has_path(const PrefixCode& p) const { return tree_.find(p) != CodeTree::kNone; }

  std::size_t level_count() const { return levels_.size(); }
  const BitVector& level(std::size_t d) const { return levels_[d]; }
  std::size_t size_in_bits() const;

  void serialize(ByteWriter& out) const;
  static WaveletTree deserialize(ByteReader& in);

  friend bool operator==(const WaveletTree& a, const WaveletTree& b) {
    return a.size_ == b.size_ && a.tree_ == b.tree_ && a.levels_ == b.levels_;
  }

 private:
  void compute_intervals();
  std::int32_t node_for_path(const PrefixCode& p) const;
  std::int32_t node_for_leaf(const PrefixCode& c) const;
  std::size_t rank_node(const PrefixCode& path, std::size_t i) const;
  std::size_t select_node(const PrefixCode& path, std::int32_t node, std::size_t k) const;

  CodeTree tree_;
  std::vector<BitVector> levels_;
  std::vector<std::uint64_t> begin_;  // per node: start of its interval in its level
  std::vector<std::uint64_t> count_;  // per node: elements in its subtree
  std::size_t size_ = 0;
};

}  // namespace wfwl
