#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfwl {

class ByteWriter;
class ByteReader;

/// Immutable bit sequence with rank/select directories.
///
/// Positions are 0-based; rank(b, i) counts occurrences of b in [0, i);
/// select(b, k) returns the position of the k-th (1-based) occurrence of b.
/// Rank is two table lookups plus one popcount; select binary-searches the
/// superblock counts inside a window narrowed by sampled hints.
class BitVector {
 public:
  static constexpr std::size_t kBlockBits = 64;
  static constexpr std::size_t kSuperBlockBits = 512;
  static constexpr std::size_t kSelectSample = 8192;

  BitVector() { build_directories(); }
  explicit BitVector(const std::vector<bool>& bits);
  /// Takes packed words (bit i lives in words[i/64] at bit i%64).
  BitVector(std::vector<std::uint64_t> words, std::size_t size);
  /// Parses a string of '0'/'1' characters.
  static BitVector from_string(std::string_view bits);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool access(std::size_t i) const;
  bool operator[](std::size_t i) const { return access(i); }

  std::size_t rank(bool bit, std::size_t i) const;
  std::size_t rank1(std::size_t i) const;
  std::size_t rank0(std::size_t i) const { return i - rank1(i); }
  std::size_t count(bool bit) const { return bit ? ones_ : size_ - ones_; }

  std::size_t select(bool bit, std::size_t k) const;
  std::size_t select1(std::size_t k) const { return select(true, k); }
  std::size_t select0(std::size_t k) const { return select(false, k); }

  std::string to_string() const;

  /// Bits spent on rank/select directories (excluding the payload).
  std::size_t directory_bits() const;

  std::span<const std::uint64_t> words() const { return words_; }

  void serialize(ByteWriter& out) const;
  static BitVector deserialize(ByteReader& in);

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  void build_directories();
  // Unchecked: 0 <= i <= size_.
  std::size_t rank1_unchecked(std::size_t i) const;
  std::size_t ones_before_superblock(bool bit, std::size_t sb) const;

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
  std::vector<std::uint64_t> superblocks_;  // ones before each superblock, plus total
  std::vector<std::uint16_t> blocks_;       // ones before each word, within its superblock
  std::vector<std::uint32_t> select_hints_[2];  // superblock of occurrence 1 + j*kSelectSample
};

/// Accumulates bits, then freezes into a BitVector.
class BitVectorBuilder {
 public:
  void reserve(std::size_t n) { words_.reserve((n + 63) / 64); }
  void push_back(bool bit) {
    if (size_ % 64 == 0) words_.push_back(0);
    if (bit) words_.back() |= std::uint64_t{1} << (size_ % 64);
    ++size_;
  }
  std::size_t size() const { return size_; }
  BitVector build() && { return BitVector(std::move(words_), size_); }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace wfwl
