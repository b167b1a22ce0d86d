#pragma once

// Binary symbol-table pickle (<uname-hex>.sym):
//
//   magic "SYMPKL1\0", then one `module` production, then a CRC-32 of every
//   preceding byte (4 bytes, little-endian), then EOF.
//
// Unsigned integers are LEB128; enum values and offsets are zigzag LEB128;
// identifiers are a LEB128 byte count followed by UTF-8; sequences are a
// LEB128 count followed by elements; products are fields in grammar order;
// sums are a 1-based LEB128 constructor tag, the constructor's fields, then
// the type's attributes.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "cdb/support/bytes.hpp"
#include "cdb/sym/accounting.hpp"
#include "cdb/sym/errors.hpp"
#include "cdb/sym/model.hpp"

namespace cdb::sym {

inline constexpr std::string_view kPickleMagic{"SYMPKL1\0", 8};

// Deterministic: equal modules produce identical bytes. When accounting is
// given, every emitted byte is attributed to exactly one category.
Bytes pickle(const Module& m, ByteAccounting* accounting = nullptr);

// Writes the pickle to sink and returns the byte count. Throws cdb::Error if
// the stream fails.
std::size_t write_module(const Module& m, std::ostream& sink);

// Parses and validates. Throws SymtabError; never returns a partial module.
Module unpickle(std::span<const std::byte> bytes);
Module read_module(std::istream& source);

// "<uname as 8 lowercase hex digits>.sym"
std::string symfile_name(std::uint32_t uname);

}  // namespace cdb::sym
