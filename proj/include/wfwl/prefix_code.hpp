#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "wfwl/error.hpp"

namespace wfwl {

/// Variable-length bit string, most significant bit first. `bits` holds the
/// code right-aligned: the first code bit is bit (length-1) of `bits`.
///
/// The sentinel-integer form prepends a 1 so that the length survives in a
/// plain integer: 01010 -> 0b101010 = 42.
struct PrefixCode {
  static constexpr unsigned kMaxLength = 63;

  std::uint64_t bits = 0;
  std::uint8_t length = 0;

  constexpr PrefixCode() = default;
  constexpr PrefixCode(std::uint64_t value, unsigned len)
      : bits(len == 0 ? 0 : value & (len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1)),
        length(static_cast<std::uint8_t>(len)) {
    if (len > kMaxLength) throw EncodingError("prefix code longer than 63 bits");
  }

  static PrefixCode from_string(std::string_view s) {
    PrefixCode c;
    for (char ch : s) {
      if (ch == ' ') continue;
      if (ch != '0' && ch != '1') throw EncodingError("prefix code may only contain 0 and 1");
      c = c.append(ch == '1' ? 1 : 0, 1);
    }
    return c;
  }

  std::string to_string() const {
    std::string s(length, '0');
    for (unsigned i = 0; i < length; ++i)
      if (bit(i)) s[i] = '1';
    return s;
  }

  /// i-th bit counted from the left (0 = most significant).
  constexpr bool bit(unsigned i) const { return (bits >> (length - 1 - i)) & 1u; }

  constexpr bool empty() const { return length == 0; }

  /// This code followed by the low `width` bits of `field`.
  constexpr PrefixCode append(std::uint64_t field, unsigned width) const {
    if (length + width > kMaxLength) throw EncodingError("prefix code longer than 63 bits");
    if (width == 0) return *this;
    std::uint64_t mask = (std::uint64_t{1} << width) - 1;
    return PrefixCode((bits << width) | (field & mask), length + width);
  }

  /// First `len` bits.
  constexpr PrefixCode prefix(unsigned len) const {
    if (len >= length) return *this;
    return PrefixCode(bits >> (length - len), len);
  }

  constexpr bool is_prefix_of(const PrefixCode& other) const {
    return length <= other.length && other.prefix(length) == *this;
  }

  constexpr std::uint64_t to_sentinel() const { return (std::uint64_t{1} << length) | bits; }

  static constexpr PrefixCode from_sentinel(std::uint64_t x) {
    if (x == 0) throw EncodingError("sentinel integer must be positive");
    unsigned len = static_cast<unsigned>(std::bit_width(x)) - 1;
    return PrefixCode(x & ((std::uint64_t{1} << len) - 1), len);
  }

  friend constexpr bool operator==(const PrefixCode& a, const PrefixCode& b) {
    return a.length == b.length && a.bits == b.bits;
  }

  /// Lexicographic bit-string order; a proper prefix sorts before its extensions.
  friend constexpr std::strong_ordering operator<=>(const PrefixCode& a, const PrefixCode& b) {
    unsigned m = a.length < b.length ? a.length : b.length;
    std::uint64_t pa = m == 0 ? 0 : a.bits >> (a.length - m);
    std::uint64_t pb = m == 0 ? 0 : b.bits >> (b.length - m);
    if (pa != pb) return pa <=> pb;
    return a.length <=> b.length;
  }
};

}  // namespace wfwl

template <>
struct std::hash<wfwl::PrefixCode> {
  std::size_t operator()(const wfwl::PrefixCode& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.to_sentinel());
  }
};
