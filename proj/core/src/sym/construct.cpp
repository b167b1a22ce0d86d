#include "cdb/sym/construct.hpp"

#include <limits>
#include <set>

namespace cdb::sym {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConstructionError(what);
}

void check_attrs(std::uint32_t align) { require(align >= 1, "type alignment must be at least 1"); }

void check_fields(const std::vector<Field>& fields, std::uint32_t size, std::uint32_t align,
                  const char* what) {
  check_attrs(align);
  require(size % align == 0, std::string(what) + " size must be a multiple of its alignment");
  for (const auto& f : fields) {
    require(f.offset >= 0, "field '" + f.id + "' has a negative offset");
    require(f.bitsize != 0 || f.lsb == 0, "field '" + f.id + "' has lsb without bitsize");
    require(f.lsb + f.bitsize <= 32, "bit field '" + f.id + "' exceeds its storage unit");
  }
}

Type qualified(TypeNode node, std::uint32_t size, std::uint32_t align, Uid base) {
  check_attrs(align);
  require(base != kNoUid, "referenced type uid must be nonzero");
  return Type{std::move(node), size, align};
}

Symbol with_attrs(SymbolNode node, SymbolAttributes attrs) {
  require(attrs.uid != kNoUid, "symbol uid must be nonzero");
  require(!attrs.id.empty(), "symbol id must be nonempty");
  require(attrs.type != kNoUid, "symbol '" + attrs.id + "' has no type");
  require(attrs.uplink != attrs.uid, "symbol '" + attrs.id + "' links to itself");
  return Symbol{std::move(node), std::move(attrs.id), attrs.uid,
                attrs.module, std::move(attrs.src), attrs.type, attrs.uplink};
}

}  // namespace

Type make_int(std::uint32_t size, std::uint32_t align) {
  check_attrs(align);
  return {types::Int{}, size, align};
}
Type make_unsigned(std::uint32_t size, std::uint32_t align) {
  check_attrs(align);
  return {types::Unsigned{}, size, align};
}
Type make_float(std::uint32_t size, std::uint32_t align) {
  check_attrs(align);
  return {types::Float{}, size, align};
}
Type make_void() { return {types::Void{}, 0, 1}; }

Type make_pointer(std::uint32_t size, std::uint32_t align, Uid referent) {
  return qualified(types::Pointer{referent}, size, align, referent);
}

Type make_enum(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<EnumItem> ids) {
  check_attrs(align);
  std::set<std::string> seen;
  for (const auto& e : ids) {
    require(seen.insert(e.id).second, "duplicate enumerator '" + e.id + "'");
  }
  return {types::Enum{std::move(tag), std::move(ids)}, size, align};
}

Type make_struct(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<Field> fields) {
  check_fields(fields, size, align, "struct");
  return {types::Struct{std::move(tag), std::move(fields)}, size, align};
}

Type make_union(std::uint32_t size, std::uint32_t align, std::string tag, std::vector<Field> fields) {
  check_fields(fields, size, align, "union");
  return {types::Union{std::move(tag), std::move(fields)}, size, align};
}

Type make_array(std::uint32_t size, std::uint32_t align, Uid element, std::uint32_t nelems) {
  return qualified(types::Array{element, nelems}, size, align, element);
}

Type make_function(std::uint32_t size, std::uint32_t align, Uid result, std::vector<Uid> formals) {
  for (Uid f : formals) require(f != kNoUid, "formal parameter type uid must be nonzero");
  return qualified(types::Function{result, std::move(formals)}, size, align, result);
}

Type make_const(std::uint32_t size, std::uint32_t align, Uid base) {
  return qualified(types::Const{base}, size, align, base);
}

Type make_volatile(std::uint32_t size, std::uint32_t align, Uid base) {
  return qualified(types::Volatile{base}, size, align, base);
}

Field make_field(std::string id, Uid type, std::int32_t offset, std::uint32_t bitsize,
                 std::uint32_t lsb) {
  require(type != kNoUid, "field '" + id + "' has no type");
  require(bitsize != 0 || lsb == 0, "field '" + id + "' has lsb without bitsize");
  return Field{std::move(id), type, offset, bitsize, lsb};
}

Symbol make_static(SymbolAttributes attrs, std::uint32_t index) {
  return with_attrs(symbols::Static{index}, std::move(attrs));
}
Symbol make_global(SymbolAttributes attrs, std::uint32_t index) {
  return with_attrs(symbols::Global{index}, std::move(attrs));
}
Symbol make_typedef(SymbolAttributes attrs) { return with_attrs(symbols::Typedef{}, std::move(attrs)); }
Symbol make_local(SymbolAttributes attrs, std::int32_t offset) {
  return with_attrs(symbols::Local{offset}, std::move(attrs));
}
Symbol make_param(SymbolAttributes attrs, std::int32_t offset) {
  return with_attrs(symbols::Param{offset}, std::move(attrs));
}
Symbol make_enumconst(SymbolAttributes attrs, std::int32_t value) {
  return with_attrs(symbols::EnumConst{value}, std::move(attrs));
}

namespace {

enum class Kind { Int, Identifier, Enums, Fields, Uids };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int: return "int";
    case Kind::Identifier: return "identifier";
    case Kind::Enums: return "enum*";
    case Kind::Fields: return "field*";
    case Kind::Uids: return "int*";
  }
  return "?";
}

bool matches(const FieldValue& v, Kind k) {
  switch (k) {
    case Kind::Int: return std::holds_alternative<std::int64_t>(v);
    case Kind::Identifier: return std::holds_alternative<std::string>(v);
    case Kind::Enums: return std::holds_alternative<std::vector<EnumItem>>(v);
    case Kind::Fields: return std::holds_alternative<std::vector<Field>>(v);
    case Kind::Uids: return std::holds_alternative<std::vector<Uid>>(v);
  }
  return false;
}

void check_signature(std::string_view ctor, std::span<const FieldValue> fields,
                     std::initializer_list<Kind> expected) {
  if (fields.size() != expected.size()) {
    throw ConstructionError(std::string(ctor) + " takes " + std::to_string(expected.size()) +
                            " field(s), got " + std::to_string(fields.size()));
  }
  std::size_t i = 0;
  for (Kind k : expected) {
    if (!matches(fields[i], k)) {
      throw ConstructionError(std::string(ctor) + " field " + std::to_string(i + 1) +
                              " must be " + kind_name(k));
    }
    ++i;
  }
}

std::uint32_t as_u32(const FieldValue& v, std::string_view what) {
  auto n = std::get<std::int64_t>(v);
  if (n < 0 || n > std::numeric_limits<std::uint32_t>::max()) {
    throw ConstructionError(std::string(what) + " out of range");
  }
  return static_cast<std::uint32_t>(n);
}

std::int32_t as_i32(const FieldValue& v, std::string_view what) {
  auto n = std::get<std::int64_t>(v);
  if (n < std::numeric_limits<std::int32_t>::min() || n > std::numeric_limits<std::int32_t>::max()) {
    throw ConstructionError(std::string(what) + " out of range");
  }
  return static_cast<std::int32_t>(n);
}

}  // namespace

Type construct_type(std::string_view c, std::span<const FieldValue> f, std::uint32_t size,
                    std::uint32_t align) {
  if (c == "INT" || c == "UNSIGNED" || c == "FLOAT" || c == "VOID") {
    check_signature(c, f, {});
    if (c == "INT") return make_int(size, align);
    if (c == "UNSIGNED") return make_unsigned(size, align);
    if (c == "FLOAT") return make_float(size, align);
    if (size != 0) throw ConstructionError("VOID must have size 0");
    return make_void();
  }
  if (c == "POINTER" || c == "CONST" || c == "VOLATILE") {
    check_signature(c, f, {Kind::Int});
    Uid t = as_u32(f[0], "type");
    if (c == "POINTER") return make_pointer(size, align, t);
    if (c == "CONST") return make_const(size, align, t);
    return make_volatile(size, align, t);
  }
  if (c == "ENUM") {
    check_signature(c, f, {Kind::Identifier, Kind::Enums});
    return make_enum(size, align, std::get<std::string>(f[0]), std::get<std::vector<EnumItem>>(f[1]));
  }
  if (c == "STRUCT" || c == "UNION") {
    check_signature(c, f, {Kind::Identifier, Kind::Fields});
    auto tag = std::get<std::string>(f[0]);
    auto fields = std::get<std::vector<Field>>(f[1]);
    return c == "STRUCT" ? make_struct(size, align, std::move(tag), std::move(fields))
                         : make_union(size, align, std::move(tag), std::move(fields));
  }
  if (c == "ARRAY") {
    check_signature(c, f, {Kind::Int, Kind::Int});
    return make_array(size, align, as_u32(f[0], "type"), as_u32(f[1], "nelems"));
  }
  if (c == "FUNCTION") {
    check_signature(c, f, {Kind::Int, Kind::Uids});
    return make_function(size, align, as_u32(f[0], "type"), std::get<std::vector<Uid>>(f[1]));
  }
  throw ConstructionError("unknown type constructor '" + std::string(c) + "'");
}

Symbol construct_symbol(std::string_view c, std::span<const FieldValue> f, SymbolAttributes attrs) {
  if (c == "TYPEDEF") {
    check_signature(c, f, {});
    return make_typedef(std::move(attrs));
  }
  if (c == "STATIC" || c == "GLOBAL") {
    check_signature(c, f, {Kind::Int});
    auto index = as_u32(f[0], "index");
    return c == "STATIC" ? make_static(std::move(attrs), index) : make_global(std::move(attrs), index);
  }
  if (c == "LOCAL" || c == "PARAM" || c == "ENUMCONST") {
    check_signature(c, f, {Kind::Int});
    auto v = as_i32(f[0], c == "ENUMCONST" ? "value" : "offset");
    if (c == "LOCAL") return make_local(std::move(attrs), v);
    if (c == "PARAM") return make_param(std::move(attrs), v);
    return make_enumconst(std::move(attrs), v);
  }
  throw ConstructionError("unknown symbol constructor '" + std::string(c) + "'");
}

}  // namespace cdb::sym
