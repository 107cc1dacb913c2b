#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace wfwl {

/// Append-only little-endian byte sink.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u16(std::uint16_t v) { put_le(v, 2); }
  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }
  void put_varint(std::uint64_t v);
  void put_bytes(std::string_view bytes) { buf_.append(bytes); }
  /// Length-prefixed (varint) string.
  void put_string(std::string_view s);

  std::size_t size() const { return buf_.size(); }
  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

  /// Overwrite 8 bytes at `at` (used to patch section tables).
  void patch_u64(std::size_t at, std::uint64_t v);

 private:
  void put_le(std::uint64_t v, int n);
  std::string buf_;
};

/// Bounds-checked little-endian reader. Every failure throws FormatError with
/// the absolute offset (base + local position).
class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::uint64_t base = 0)
      : data_(data), base_(base) {}

  std::uint8_t u8();
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  std::uint64_t varint();
  std::string_view bytes(std::size_t n);
  std::string string();

  std::size_t position() const { return pos_; }
  std::uint64_t offset() const { return base_ + pos_; }
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  /// Throws unless every byte has been consumed.
  void expect_end(const char* what) const;
  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::uint64_t get_le(int n);
  std::string_view data_;
  std::uint64_t base_;
  std::size_t pos_ = 0;
};

}  // namespace wfwl
