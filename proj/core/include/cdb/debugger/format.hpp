#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "cdb/support/error.hpp"
#include "cdb/sym/index.hpp"

namespace cdb::debugger {

class FormatError : public Error {
 public:
  using Error::Error;
};

// Renders a value of the given type from its target bytes. bytes.size()
// must equal the type's size (4 for function types, which print as the
// function's address). Throws FormatError.
std::string format_value(const sym::SymbolIndex& module, sym::Uid type, std::span<const std::byte> bytes);

// Field value from the 4-byte storage unit that holds it.
std::int64_t extract_bitfield(std::span<const std::byte> unit, std::uint32_t bitsize, std::uint32_t lsb, bool is_signed);

// Short C-like spelling, e.g. "struct node *", "int [40]".
std::string type_spelling(const sym::SymbolIndex& module, sym::Uid type);

}  // namespace cdb::debugger
