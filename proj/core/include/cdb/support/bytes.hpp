#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdb/support/error.hpp"

namespace cdb {

using Bytes = std::vector<std::byte>;

// Raised when a ByteReader runs off the end of its input.
class TruncatedInput : public Error {
 public:
  TruncatedInput() : Error("unexpected end of input") {}
};

class MalformedInput : public Error {
 public:
  using Error::Error;
};

constexpr std::uint64_t zigzag_encode(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr std::int64_t zigzag_decode(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

// Append-only byte sink with LEB128 and fixed-width little-endian encoders.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : out_(&out) {}

  void put_u8(std::uint8_t v) { sink().push_back(static_cast<std::byte>(v)); }
  void put_uleb(std::uint64_t v);
  void put_sleb(std::int64_t v) { put_uleb(zigzag_encode(v)); }
  void put_u32le(std::uint32_t v);
  void put_u64le(std::uint64_t v);
  void put_bytes(std::span<const std::byte> bytes);
  // LEB128 length, then the raw bytes.
  void put_string(std::string_view s);

  std::size_t size() const { return out_ ? out_->size() : own_.size(); }
  const Bytes& bytes() const { return out_ ? *out_ : own_; }
  Bytes take() { return out_ ? *out_ : std::move(own_); }

 private:
  Bytes& sink() { return out_ ? *out_ : own_; }

  Bytes own_;
  Bytes* out_ = nullptr;
};

// Cursor over an immutable byte span. Every getter throws TruncatedInput
// rather than reading past the end.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> in) : in_(in) {}

  std::uint8_t get_u8();
  std::uint64_t get_uleb();
  std::int64_t get_sleb() { return zigzag_decode(get_uleb()); }
  // uleb that must fit in 32 bits.
  std::uint32_t get_uleb32();
  std::int32_t get_sleb32();
  std::uint32_t get_u32le();
  std::uint64_t get_u64le();
  std::span<const std::byte> get_bytes(std::size_t n);
  std::string get_string();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(std::span<const std::byte> bytes);

inline std::span<const std::byte> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::byte> bytes);

}  // namespace cdb
