#include "wfwl/code_tree.hpp"

#include <bit>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"

namespace wfwl {

CodeTree::CodeTree() { nodes_.emplace_back(); }

std::int32_t CodeTree::add_path(const PrefixCode& code) {
  std::int32_t cur = 0;
  for (unsigned d = 0; d < code.length; ++d) {
    if (nodes_[cur].symbol >= 0)
      throw EncodingError("code " + code.to_string() + " extends the leaf " + nodes_[cur].code.to_string());
    int b = code.bit(d) ? 1 : 0;
    if (nodes_[cur].child[b] == kNone) {
      Node n;
      n.code = code.prefix(d + 1);
      nodes_.push_back(n);
      nodes_[cur].child[b] = static_cast<std::int32_t>(nodes_.size() - 1);
    }
    cur = nodes_[cur].child[b];
  }
  return cur;
}

CodeTree CodeTree::from_leaves(std::span<const std::pair<PrefixCode, std::uint64_t>> leaves) {
  CodeTree t;
  for (const auto& [code, symbol] : leaves) {
    std::int32_t id = t.add_path(code);
    Node& n = t.nodes_[id];
    if (n.child[0] != kNone || n.child[1] != kNone)
      throw EncodingError("code " + code.to_string() + " is a proper prefix of another code");
    if (n.symbol >= 0) throw EncodingError("code " + code.to_string() + " assigned twice");
    n.symbol = static_cast<std::int64_t>(symbol);
    if (!t.symbol_to_leaf_.emplace(symbol, id).second)
      throw EncodingError("symbol " + std::to_string(symbol) + " assigned twice");
  }
  return t;
}

unsigned CodeTree::width_for(std::uint64_t max_value) {
  unsigned w = static_cast<unsigned>(std::bit_width(max_value));
  return w == 0 ? 1 : w;
}

CodeTree CodeTree::fixed_width(unsigned width, std::uint64_t first, std::uint64_t last) {
  CodeTree t;
  if (width == 0 || width > PrefixCode::kMaxLength) throw EncodingError("invalid fixed code width");
  t.fixed_width_ = width;
  t.fixed_first_ = first;
  t.fixed_last_ = last;
  if (first > last) return t;
  if (std::bit_width(last) > width) throw EncodingError("symbol does not fit fixed code width");
  for (std::uint64_t s = first; s <= last; ++s) {
    std::int32_t id = t.add_path(PrefixCode(s, width));
    t.nodes_[id].symbol = static_cast<std::int64_t>(s);
    t.symbol_to_leaf_.emplace(s, id);
  }
  return t;
}

std::int32_t CodeTree::find(const PrefixCode& path) const {
  std::int32_t cur = 0;
  for (unsigned d = 0; d < path.length && cur != kNone; ++d) cur = nodes_[cur].child[path.bit(d) ? 1 : 0];
  return cur;
}

std::int32_t CodeTree::leaf_of_symbol(std::uint64_t symbol) const {
  auto it = symbol_to_leaf_.find(symbol);
  return it == symbol_to_leaf_.end() ? kNone : it->second;
}

std::vector<std::pair<PrefixCode, std::uint64_t>> CodeTree::leaves() const {
  std::vector<std::pair<PrefixCode, std::uint64_t>> out;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    std::int32_t id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (n.symbol >= 0) out.emplace_back(n.code, static_cast<std::uint64_t>(n.symbol));
    if (n.child[1] != kNone) stack.push_back(n.child[1]);
    if (n.child[0] != kNone) stack.push_back(n.child[0]);
  }
  return out;
}

// Explicit trees: node count, then preorder topology bits (leaf: 0; internal:
// 1 followed by one presence bit per child), then leaf symbols as varints in
// preorder. Fixed-width trees only store (width, first, last).
void CodeTree::serialize(ByteWriter& out) const {
  if (is_fixed_width()) {
    out.put_u8(1);
    out.put_varint(fixed_width_);
    out.put_varint(fixed_first_);
    out.put_varint(fixed_last_);
    return;
  }
  out.put_u8(0);
  if (empty()) {
    out.put_varint(0);
    return;
  }
  std::vector<bool> topo;
  std::vector<std::uint64_t> symbols;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    std::int32_t id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (n.symbol >= 0) {
      topo.push_back(false);
      symbols.push_back(static_cast<std::uint64_t>(n.symbol));
      continue;
    }
    topo.push_back(true);
    topo.push_back(n.child[0] != kNone);
    topo.push_back(n.child[1] != kNone);
    if (n.child[1] != kNone) stack.push_back(n.child[1]);
    if (n.child[0] != kNone) stack.push_back(n.child[0]);
  }
  out.put_varint(nodes_.size());
  out.put_varint(topo.size());
  std::uint8_t byte = 0;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    if (topo[i]) byte |= static_cast<std::uint8_t>(1u << (i % 8));
    if (i % 8 == 7) {
      out.put_u8(byte);
      byte = 0;
    }
  }
  if (topo.size() % 8) out.put_u8(byte);
  for (auto s : symbols) out.put_varint(s);
}

CodeTree CodeTree::deserialize(ByteReader& in) {
  std::uint8_t kind = in.u8();
  if (kind == 1) {
    auto width = in.varint();
    auto first = in.varint();
    auto last = in.varint();
    if (width == 0 || width > PrefixCode::kMaxLength) in.fail("invalid fixed code width");
    if (last >= first && last - first >= (std::uint64_t{1} << 31))
      in.fail("fixed-width alphabet implausibly large");
    try {
      return fixed_width(static_cast<unsigned>(width), first, last);
    } catch (const EncodingError& e) {
      in.fail(e.what());
    }
  }
  if (kind != 0) in.fail("unknown code tree kind");
  std::uint64_t n_nodes = in.varint();
  if (n_nodes == 0) return CodeTree();
  std::uint64_t n_topo = in.varint();
  if (n_topo > in.remaining() * 8) in.fail("code tree topology exceeds section");
  auto raw = in.bytes(static_cast<std::size_t>((n_topo + 7) / 8));
  std::size_t cursor = 0;
  auto next_bit = [&]() -> bool {
    if (cursor >= n_topo) in.fail("code tree topology truncated");
    bool b = (static_cast<std::uint8_t>(raw[cursor / 8]) >> (cursor % 8)) & 1u;
    ++cursor;
    return b;
  };
  // Rebuild paths of the leaves in preorder.
  std::vector<PrefixCode> leaf_codes;
  std::vector<PrefixCode> stack{PrefixCode()};
  while (!stack.empty()) {
    PrefixCode code = stack.back();
    stack.pop_back();
    if (!next_bit()) {
      leaf_codes.push_back(code);
      continue;
    }
    bool has0 = next_bit();
    bool has1 = next_bit();
    if (!has0 && !has1) in.fail("internal code tree node without children");
    if (code.length >= PrefixCode::kMaxLength) in.fail("code tree deeper than 63");
    if (has1) stack.push_back(code.append(1, 1));
    if (has0) stack.push_back(code.append(0, 1));
  }
  if (cursor != n_topo) in.fail("code tree topology has trailing bits");
  std::vector<std::pair<PrefixCode, std::uint64_t>> leaves;
  leaves.reserve(leaf_codes.size());
  for (const auto& c : leaf_codes) leaves.emplace_back(c, in.varint());
  try {
    CodeTree t = from_leaves(leaves);
    if (t.node_count() != n_nodes) in.fail("code tree node count mismatch");
    return t;
  } catch (const EncodingError& e) {
    in.fail(e.what());
  }
}

bool operator==(const CodeTree& a, const CodeTree& b) {
  return a.fixed_width_ == b.fixed_width_ && a.fixed_first_ == b.fixed_first_ &&
         a.fixed_last_ == b.fixed_last_ && a.leaves() == b.leaves();
}

}  // namespace wfwl
