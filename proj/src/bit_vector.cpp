#include "wfwl/bit_vector.hpp"

#include <bit>

#include "wfwl/byte_io.hpp"
#include "wfwl/error.hpp"

namespace wfwl {
namespace {

constexpr std::size_t kWordsPerSuper = BitVector::kSuperBlockBits / BitVector::kBlockBits;

// Position of the k-th (0-based) set bit of w; w must have more than k set bits.
inline unsigned select_in_word(std::uint64_t w, unsigned k) {
  for (unsigned byte = 0; byte < 8; ++byte) {
    unsigned c = static_cast<unsigned>(std::popcount((w >> (8 * byte)) & 0xffu));
    if (k < c) {
      std::uint64_t b = (w >> (8 * byte)) & 0xffu;
      for (unsigned i = 0; i < 8; ++i) {
        if (b & (1u << i)) {
          if (k == 0) return 8 * byte + i;
          --k;
        }
      }
    }
    k -= c;
  }
  return 64;  // unreachable under the precondition
}

}  // namespace

BitVector::BitVector(const std::vector<bool>& bits) : size_(bits.size()) {
  words_.assign((size_ + 63) / 64, 0);
  for (std::size_t i = 0; i < size_; ++i)
    if (bits[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
  build_directories();
}

BitVector::BitVector(std::vector<std::uint64_t> words, std::size_t size)
    : words_(std::move(words)), size_(size) {
  words_.resize((size_ + 63) / 64, 0);
  if (size_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  build_directories();
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVectorBuilder b;
  for (char c : bits) {
    if (c != '0' && c != '1') throw EncodingError("bit string may only contain 0 and 1");
    b.push_back(c == '1');
  }
  return std::move(b).build();
}

void BitVector::build_directories() {
  std::size_t n_words = words_.size();
  std::size_t n_super = n_words / kWordsPerSuper + 1;
  superblocks_.assign(n_super + 1, 0);
  blocks_.assign(n_words, 0);
  std::uint64_t total = 0;
  for (std::size_t sb = 0; sb < n_super; ++sb) {
    superblocks_[sb] = total;
    std::uint16_t within = 0;
    for (std::size_t w = sb * kWordsPerSuper; w < std::min(n_words, (sb + 1) * kWordsPerSuper); ++w) {
      blocks_[w] = within;
      within = static_cast<std::uint16_t>(within + std::popcount(words_[w]));
    }
    total += within;
  }
  superblocks_[n_super] = total;
  ones_ = static_cast<std::size_t>(total);

  for (int bit = 0; bit < 2; ++bit) {
    auto& hints = select_hints_[bit];
    hints.clear();
    std::size_t next = 1;  // occurrence ordinal we want a hint for
    std::size_t occ = count(bit == 1);
    for (std::size_t sb = 0; sb < n_super && next <= occ; ++sb) {
      std::size_t upto = ones_before_superblock(bit == 1, sb + 1);
      while (next <= occ && next <= upto) {
        hints.push_back(static_cast<std::uint32_t>(sb));
        next += kSelectSample;
      }
    }
  }
}

std::size_t BitVector::ones_before_superblock(bool bit, std::size_t sb) const {
  std::size_t ones = static_cast<std::size_t>(superblocks_[sb]);
  if (bit) return ones;
  std::size_t bits = std::min(sb * kSuperBlockBits, size_);
  return bits - ones;
}

bool BitVector::access(std::size_t i) const {
  if (i >= size_)
    throw RangeError("access position " + std::to_string(i) + " out of range [0, " +
                     std::to_string(size_) + ")");
  return (words_[i / 64] >> (i % 64)) & 1u;
}

std::size_t BitVector::rank1_unchecked(std::size_t i) const {
  std::size_t w = i / 64;
  if (w >= words_.size()) return ones_;
  std::size_t r = static_cast<std::size_t>(superblocks_[w / kWordsPerSuper]) + blocks_[w];
  if (i % 64) r += static_cast<std::size_t>(std::popcount(words_[w] & ((std::uint64_t{1} << (i % 64)) - 1)));
  return r;
}

std::size_t BitVector::rank1(std::size_t i) const {
  if (i > size_)
    throw RangeError("rank position " + std::to_string(i) + " exceeds length " + std::to_string(size_));
  return rank1_unchecked(i);
}

std::size_t BitVector::rank(bool bit, std::size_t i) const { return bit ? rank1(i) : rank0(i); }

std::size_t BitVector::select(bool bit, std::size_t k) const {
  if (k == 0 || k > count(bit))
    throw NotFoundError("select: occurrence " + std::to_string(k) + " of bit " + (bit ? "1" : "0") +
                        " does not exist (have " + std::to_string(count(bit)) + ")");
  const auto& hints = select_hints_[bit ? 1 : 0];
  std::size_t h = (k - 1) / kSelectSample;
  std::size_t lo = hints[h];
  std::size_t hi = h + 1 < hints.size() ? hints[h + 1] : superblocks_.size() - 2;
  // Largest superblock in [lo, hi] with fewer than k occurrences before it.
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (ones_before_superblock(bit, mid) < k)
      lo = mid;
    else
      hi = mid - 1;
  }
  std::size_t remaining = k - ones_before_superblock(bit, lo);
  for (std::size_t w = lo * kWordsPerSuper; w < words_.size(); ++w) {
    std::uint64_t word = bit ? words_[w] : ~words_[w];
    std::size_t c = static_cast<std::size_t>(std::popcount(word));
    if (remaining <= c) return w * 64 + select_in_word(word, static_cast<unsigned>(remaining - 1));
    remaining -= c;
  }
  throw NotFoundError("select: directory inconsistent");
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((words_[i / 64] >> (i % 64)) & 1u) s[i] = '1';
  return s;
}

std::size_t BitVector::directory_bits() const {
  return superblocks_.size() * 64 + blocks_.size() * 16 +
         (select_hints_[0].size() + select_hints_[1].size()) * 32;
}

void BitVector::serialize(ByteWriter& out) const {
  out.put_u64(size_);
  for (auto w : words_) out.put_u64(w);
}

BitVector BitVector::deserialize(ByteReader& in) {
  std::uint64_t n = in.u64();
  std::uint64_t n_words = (n + 63) / 64;
  if (n_words > in.remaining() / 8) in.fail("bitvector length exceeds section");
  std::vector<std::uint64_t> words(static_cast<std::size_t>(n_words));
  for (auto& w : words) w = in.u64();
  if (n % 64 != 0 && (words.back() >> (n % 64)) != 0) in.fail("bitvector padding bits set");
  return BitVector(std::move(words), static_cast<std::size_t>(n));
}

}  // namespace wfwl
