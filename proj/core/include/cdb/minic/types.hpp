#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cdb/minic/diagnostics.hpp"

namespace cdb::minic {

enum class TypeKind { Void, Int, Unsigned, Float, Pointer, Array, Struct, Union, Enum, Function, Const, Volatile };

struct CType;
using TypeRef = const CType*;

struct FieldInfo {
  std::string name;
  Loc loc;
  TypeRef type = nullptr;
  std::uint32_t offset = 0;
  std::uint32_t bitsize = 0;  // 0 for ordinary fields
  std::uint32_t lsb = 0;      // shift within the 4-byte storage unit
};

struct Record {
  bool is_union = false;
  std::string tag;
  Loc loc;
  bool complete = false;
  std::vector<FieldInfo> fields;
  std::uint32_t size = 0;
  std::uint32_t align = 1;

  const FieldInfo* field(const std::string& name) const;
};

struct EnumInfo {
  std::string tag;
  Loc loc;
  std::vector<std::pair<std::string, std::int32_t>> items;
};

// Types are interned by TypeTable: structurally equal non-record types share
// one object, so pointer identity is type identity.
struct CType {
  TypeKind kind = TypeKind::Void;
  std::uint32_t size = 0;
  std::uint32_t align = 1;
  TypeRef base = nullptr;  // pointee, element, result, or qualified type
  std::uint32_t nelems = 0;
  std::vector<TypeRef> params;
  Record* record = nullptr;
  EnumInfo* enumeration = nullptr;
};

class TypeTable {
 public:
  TypeTable();
  TypeTable(const TypeTable&) = delete;
  TypeTable& operator=(const TypeTable&) = delete;

  TypeRef void_type() const { return void_; }
  TypeRef int_type(std::uint32_t size = 4);
  TypeRef unsigned_type(std::uint32_t size = 4);
  TypeRef float_type(std::uint32_t size);
  TypeRef pointer_to(TypeRef base);
  TypeRef array_of(TypeRef element, std::uint32_t nelems);
  TypeRef function(TypeRef result, std::vector<TypeRef> params);
  TypeRef qualified(TypeRef base, bool is_const, bool is_volatile);

  Record* new_record(bool is_union, std::string tag, Loc loc);
  EnumInfo* new_enum(std::string tag, Loc loc);
  TypeRef record_type(Record* r);
  TypeRef enum_type(EnumInfo* e);
  // Lays out the fields and fixes size/align of the record's type.
  void complete_record(Record* r, std::vector<FieldInfo> fields, Diagnostics& diags, const std::string& file);

 private:
  TypeRef intern(CType t);

  std::deque<CType> storage_;
  std::map<std::tuple<int, std::uint32_t, TypeRef, std::uint32_t, std::vector<TypeRef>>, TypeRef> interned_;
  std::map<const Record*, CType*> record_types_;
  std::map<const EnumInfo*, TypeRef> enum_types_;
  std::deque<Record> records_;
  std::deque<EnumInfo> enums_;
  TypeRef void_ = nullptr;
};

TypeRef unqual(TypeRef t);
bool is_const(TypeRef t);
bool is_integer(TypeRef t);
bool is_arithmetic(TypeRef t);
bool is_floating(TypeRef t);
bool is_pointer(TypeRef t);
bool is_scalar(TypeRef t);
bool is_aggregate(TypeRef t);  // struct or union
bool is_array(TypeRef t);
bool is_void(TypeRef t);
bool is_function(TypeRef t);
bool is_unsigned_int(TypeRef t);
std::string type_name(TypeRef t);

}  // namespace cdb::minic
