#include "cdb/support/bytes.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace cdb {

void ByteWriter::put_uleb(std::uint64_t v) {
  do {
    std::uint8_t b = v & 0x7f;
    v >>= 7;
    if (v != 0) b |= 0x80;
    put_u8(b);
  } while (v != 0);
}

void ByteWriter::put_u32le(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64le(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_bytes(std::span<const std::byte> bytes) {
  auto& s = sink();
  s.insert(s.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_string(std::string_view s) {
  put_uleb(s.size());
  put_bytes(as_bytes(s));
}

std::uint8_t ByteReader::get_u8() {
  if (pos_ >= in_.size()) throw TruncatedInput();
  return static_cast<std::uint8_t>(in_[pos_++]);
}

std::uint64_t ByteReader::get_uleb() {
  std::uint64_t result = 0;
  for (int shift = 0;; shift += 7) {
    if (shift >= 64) throw MalformedInput("LEB128 value overflows 64 bits");
    std::uint8_t b = get_u8();
    std::uint64_t chunk = b & 0x7f;
    if (shift == 63 && chunk > 1) throw MalformedInput("LEB128 value overflows 64 bits");
    result |= chunk << shift;
    if ((b & 0x80) == 0) {
      // Reject padded encodings so every value has exactly one byte form.
      if (b == 0 && shift != 0) throw MalformedInput("non-canonical LEB128 encoding");
      return result;
    }
  }
}

std::uint32_t ByteReader::get_uleb32() {
  auto v = get_uleb();
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw MalformedInput("integer does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

std::int32_t ByteReader::get_sleb32() {
  auto v = get_sleb();
  if (v < std::numeric_limits<std::int32_t>::min() ||
      v > std::numeric_limits<std::int32_t>::max()) {
    throw MalformedInput("integer does not fit in 32 bits");
  }
  return static_cast<std::int32_t>(v);
}

std::uint32_t ByteReader::get_u32le() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{get_u8()} << (8 * i);
  return v;
}

std::uint64_t ByteReader::get_u64le() {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{get_u8()} << (8 * i);
  return v;
}

std::span<const std::byte> ByteReader::get_bytes(std::size_t n) {
  if (n > remaining()) throw TruncatedInput();
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::get_string() {
  auto n = get_uleb();
  if (n > remaining()) throw TruncatedInput();
  auto raw = get_bytes(static_cast<std::size_t>(n));
  return {reinterpret_cast<const char*>(raw.data()), raw.size()};
}

std::uint32_t crc32(std::span<const std::byte> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large inputs in chunks.
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Bytes out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

void write_file(const std::string& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace cdb
