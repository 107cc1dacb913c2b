#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wfwl/prefix_code.hpp"

namespace wfwl {

class ByteWriter;
class ByteReader;

/// Binary tree whose root-to-leaf paths are the (prefix-free) codes of an
/// alphabet. Every leaf carries one symbol id; internal nodes carry none and
/// may have a single child. Node 0 is the root.
class CodeTree {
 public:
  static constexpr std::int32_t kNone = -1;

  struct Node {
    std::int32_t child[2] = {kNone, kNone};
    std::int64_t symbol = -1;  // >= 0 only on leaves
    PrefixCode code;
  };

  CodeTree();

  /// Tree from explicit (code, symbol) leaves. Throws EncodingError when the
  /// codes are not prefix-free or a symbol repeats.
  static CodeTree from_leaves(std::span<const std::pair<PrefixCode, std::uint64_t>> leaves);

  /// Balanced tree over symbols [first, last], each encoded as its own value
  /// in `width` bits.
  static CodeTree fixed_width(unsigned width, std::uint64_t first, std::uint64_t last);

  /// Bits needed to write every value in [0, max_value] (at least 1).
  static unsigned width_for(std::uint64_t max_value);

  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
  bool is_leaf(std::int32_t id) const {
    const Node& n = node(id);
    return n.child[0] == kNone && n.child[1] == kNone && n.symbol >= 0;
  }
  std::size_t leaf_count() const { return symbol_to_leaf_.size(); }
  bool empty() const { return symbol_to_leaf_.empty(); }

  /// Node reached by following `path` from the root, or kNone.
  std::int32_t find(const PrefixCode& path) const;
  /// Leaf carrying `symbol`, or kNone.
  std::int32_t leaf_of_symbol(std::uint64_t symbol) const;

  /// All leaves as (code, symbol), in left-to-right order.
  std::vector<std::pair<PrefixCode, std::uint64_t>> leaves() const;

  bool is_fixed_width() const { return fixed_width_ > 0; }

  void serialize(ByteWriter& out) const;
  static CodeTree deserialize(ByteReader& in);

  friend bool operator==(const CodeTree& a, const CodeTree& b);

 private:
  std::int32_t add_path(const PrefixCode& code);
  void index_symbols();

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::int32_t> symbol_to_leaf_;
  unsigned fixed_width_ = 0;
  std::uint64_t fixed_first_ = 0;
  std::uint64_t fixed_last_ = 0;
};

}  // namespace wfwl
