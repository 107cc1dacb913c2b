#include "wfwl/byte_io.hpp"

#include "wfwl/error.hpp"

namespace wfwl {

void ByteWriter::put_le(std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::put_varint(std::uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  buf_.push_back(static_cast<char>(v));
}

void ByteWriter::put_string(std::string_view s) {
  put_varint(s.size());
  buf_.append(s);
}

void ByteWriter::patch_u64(std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

void ByteReader::fail(const std::string& what) const { throw FormatError(what, offset()); }

std::uint8_t ByteReader::u8() {
  if (pos_ >= data_.size()) fail("truncated input");
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint64_t ByteReader::get_le(int n) {
  if (remaining() < static_cast<std::size_t>(n)) fail("truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i)
    v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
  pos_ += n;
  return v;
}

std::uint64_t ByteReader::varint() {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    std::uint8_t b = u8();
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) return v;
  }
  fail("varint too long");
}

std::string_view ByteReader::bytes(std::size_t n) {
  if (remaining() < n) fail("truncated input");
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::string() {
  std::uint64_t n = varint();
  if (n > remaining()) fail("string length exceeds input");
  return std::string(bytes(static_cast<std::size_t>(n)));
}

void ByteReader::expect_end(const char* what) const {
  if (!at_end()) fail(std::string("trailing bytes in ") + what);
}

}  // namespace wfwl
