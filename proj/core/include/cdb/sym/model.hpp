#pragma once

// In-memory form of the symbol-table grammar:
//
//   module     = (identifier file, int uname, int nuids,
//                 item* items, int globals, spoint* spoints)
//   spoint     = (coordinate src, int tail)
//   item       = Symbol(symbol) | Type(type)          attributes(int uid)
//   coordinate = (identifier file, int x, int y)
//   symbol     = STATIC(int index) | GLOBAL(int index) | TYPEDEF
//              | LOCAL(int offset) | PARAM(int offset) | ENUMCONST(int value)
//                attributes(identifier id, int uid, int module,
//                           coordinate src, int type, int uplink)
//   field      = (identifier id, int type, int offset, int bitsize, int lsb)
//   enum       = (identifier id, int value)
//   type       = INT | UNSIGNED | FLOAT | VOID | POINTER(int type)
//              | ENUM(identifier tag, enum* ids)
//              | STRUCT(identifier tag, field* fields)
//              | UNION(identifier tag, field* fields)
//              | ARRAY(int type, int nelems) | FUNCTION(int type, int* formals)
//              | CONST(int type) | VOLATILE(int type)
//                attributes(int size, int align)
//
// Items reference each other by uid; uid 0 means "none".

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cdb::sym {

using Uid = std::uint32_t;
inline constexpr Uid kNoUid = 0;

struct Coordinate {
  std::string file;
  std::uint32_t x = 0;  // column, 1-based
  std::uint32_t y = 0;  // line, 1-based

  bool is_real() const { return !file.empty() && x >= 1 && y >= 1; }
  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

struct Field {
  std::string id;
  Uid type = kNoUid;
  std::int32_t offset = 0;
  std::uint32_t bitsize = 0;  // 0 for ordinary fields
  std::uint32_t lsb = 0;      // shift of the field's low bit within its storage unit
  bool is_bitfield() const { return bitsize != 0; }
  friend bool operator==(const Field&, const Field&) = default;
};

struct EnumItem {
  std::string id;
  std::int32_t value = 0;
  friend bool operator==(const EnumItem&, const EnumItem&) = default;
};

namespace types {
struct Int { friend bool operator==(const Int&, const Int&) = default; };
struct Unsigned { friend bool operator==(const Unsigned&, const Unsigned&) = default; };
struct Float { friend bool operator==(const Float&, const Float&) = default; };
struct Void { friend bool operator==(const Void&, const Void&) = default; };
struct Pointer {
  Uid type = kNoUid;
  friend bool operator==(const Pointer&, const Pointer&) = default;
};
struct Enum {
  std::string tag;
  std::vector<EnumItem> ids;
  friend bool operator==(const Enum&, const Enum&) = default;
};
struct Struct {
  std::string tag;
  std::vector<Field> fields;
  friend bool operator==(const Struct&, const Struct&) = default;
};
struct Union {
  std::string tag;
  std::vector<Field> fields;
  friend bool operator==(const Union&, const Union&) = default;
};
struct Array {
  Uid type = kNoUid;
  std::uint32_t nelems = 0;
  friend bool operator==(const Array&, const Array&) = default;
};
struct Function {
  Uid type = kNoUid;
  std::vector<Uid> formals;
  friend bool operator==(const Function&, const Function&) = default;
};
struct Const {
  Uid type = kNoUid;
  friend bool operator==(const Const&, const Const&) = default;
};
struct Volatile {
  Uid type = kNoUid;
  friend bool operator==(const Volatile&, const Volatile&) = default;
};
}  // namespace types

// Alternative order matches constructor order in the grammar; the pickle tag
// of an alternative is its index + 1.
using TypeNode = std::variant<types::Int, types::Unsigned, types::Float, types::Void,
                              types::Pointer, types::Enum, types::Struct, types::Union,
                              types::Array, types::Function, types::Const, types::Volatile>;

struct Type {
  TypeNode node;
  std::uint32_t size = 0;
  std::uint32_t align = 1;

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(node); }
  friend bool operator==(const Type&, const Type&) = default;
};

namespace symbols {
struct Static {
  std::uint32_t index = 0;
  friend bool operator==(const Static&, const Static&) = default;
};
struct Global {
  std::uint32_t index = 0;
  friend bool operator==(const Global&, const Global&) = default;
};
struct Typedef { friend bool operator==(const Typedef&, const Typedef&) = default; };
struct Local {
  std::int32_t offset = 0;
  friend bool operator==(const Local&, const Local&) = default;
};
struct Param {
  std::int32_t offset = 0;
  friend bool operator==(const Param&, const Param&) = default;
};
struct EnumConst {
  std::int32_t value = 0;
  friend bool operator==(const EnumConst&, const EnumConst&) = default;
};
}  // namespace symbols

using SymbolNode = std::variant<symbols::Static, symbols::Global, symbols::Typedef,
                                symbols::Local, symbols::Param, symbols::EnumConst>;

struct Symbol {
  SymbolNode node;
  std::string id;
  Uid uid = kNoUid;
  std::uint32_t module = 0;
  Coordinate src;
  Uid type = kNoUid;
  Uid uplink = kNoUid;

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(node); }
  // STATIC or GLOBAL: lives in the unit's address vector.
  bool has_address_index() const { return is<symbols::Static>() || is<symbols::Global>(); }
  std::uint32_t address_index() const;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Item {
  std::variant<Symbol, Type> value;
  Uid uid = kNoUid;

  const Symbol* symbol() const { return std::get_if<Symbol>(&value); }
  const Type* type() const { return std::get_if<Type>(&value); }
  friend bool operator==(const Item&, const Item&) = default;
};

struct SPoint {
  Coordinate src;
  Uid tail = kNoUid;
  friend bool operator==(const SPoint&, const SPoint&) = default;
};

struct Module {
  std::string file;
  std::uint32_t uname = 0;
  std::uint32_t nuids = 0;
  std::vector<Item> items;
  Uid globals = kNoUid;
  std::vector<SPoint> spoints;
  friend bool operator==(const Module&, const Module&) = default;
};

// Grammar constructor names, in grammar order.
const char* constructor_name(const TypeNode& node);
const char* constructor_name(const SymbolNode& node);

}  // namespace cdb::sym
