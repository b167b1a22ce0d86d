#pragma once

#include <array>
#include <cstdint>
#include <numeric>

namespace cdb::sym {

// Size taxonomy for debugging data, shared by the pickle writer and the
// image statistics report.
enum class ByteCategory : std::uint8_t {
  identifiers,
  symbols,
  types,
  coordinates,
  module_records,
  address_vectors,
  breakpoint_flags,
};

inline constexpr std::size_t kByteCategoryCount = 7;

const char* to_string(ByteCategory c);

struct ByteAccounting {
  std::array<std::uint64_t, kByteCategoryCount> bytes{};

  void add(ByteCategory c, std::uint64_t n) { bytes[static_cast<std::size_t>(c)] += n; }
  std::uint64_t operator[](ByteCategory c) const { return bytes[static_cast<std::size_t>(c)]; }
  std::uint64_t total() const { return std::accumulate(bytes.begin(), bytes.end(), std::uint64_t{0}); }
  ByteAccounting& operator+=(const ByteAccounting& other) {
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] += other.bytes[i];
    return *this;
  }
};

}  // namespace cdb::sym
