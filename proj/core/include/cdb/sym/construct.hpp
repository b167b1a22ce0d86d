#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdb/sym/model.hpp"
#include "cdb/support/error.hpp"

namespace cdb::sym {

class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Shared attributes of every symbol constructor.
struct SymbolAttributes {
  std::string id;
  Uid uid = kNoUid;
  std::uint32_t module = 0;
  Coordinate src;
  Uid type = kNoUid;
  Uid uplink = kNoUid;
};

// Typed constructors. Attributes come first, mirroring the generated
// constructors (e.g. sym_ENUM(4, 4, "color", ...)). Each checks the
// invariants that can be checked without the owning module.
Type make_int(std::uint32_t size, std::uint32_t align);
Type make_unsigned(std::uint32_t size, std::uint32_t align);
Type make_float(std::uint32_t size, std::uint32_t align);
Type make_void();
Type make_pointer(std::uint32_t size, std::uint32_t align, Uid referent);
Type make_enum(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<EnumItem> ids);
Type make_struct(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<Field> fields);
Type make_union(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<Field> fields);
Type make_array(std::uint32_t size, std::uint32_t align, Uid element, std::uint32_t nelems);
Type make_function(std::uint32_t size, std::uint32_t align, Uid result, std::vector<Uid> formals);
Type make_const(std::uint32_t size, std::uint32_t align, Uid base);
Type make_volatile(std::uint32_t size, std::uint32_t align, Uid base);

Field make_field(std::string id, Uid type, std::int32_t offset, std::uint32_t bitsize = 0,
                 std::uint32_t lsb = 0);

Symbol make_static(SymbolAttributes attrs, std::uint32_t index);
Symbol make_global(SymbolAttributes attrs, std::uint32_t index);
Symbol make_typedef(SymbolAttributes attrs);
Symbol make_local(SymbolAttributes attrs, std::int32_t offset);
Symbol make_param(SymbolAttributes attrs, std::int32_t offset);
Symbol make_enumconst(SymbolAttributes attrs, std::int32_t value);

inline Item make_item(Symbol s) {
  Uid uid = s.uid;
  return Item{std::move(s), uid};
}
inline Item make_item(Type t, Uid uid) { return Item{std::move(t), uid}; }

// Dynamically-typed construction by constructor name, for tools that read
// constructor applications from text. Checks arity and field kinds against
// the grammar.
using FieldValue = std::variant<std::int64_t, std::string, std::vector<EnumItem>,
                                std::vector<Field>, std::vector<Uid>>;

Type construct_type(std::string_view constructor, std::span<const FieldValue> fields,
                    std::uint32_t size, std::uint32_t align);
Symbol construct_symbol(std::string_view constructor, std::span<const FieldValue> fields,
                        SymbolAttributes attrs);

}  // namespace cdb::sym
