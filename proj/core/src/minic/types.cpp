#include "cdb/minic/types.hpp"

namespace cdb::minic {

const FieldInfo* Record::field(const std::string& name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return (v + a - 1) / a * a; }

}  // namespace

TypeTable::TypeTable() {
  CType v;
  v.kind = TypeKind::Void;
  void_ = intern(v);
}

TypeRef TypeTable::intern(CType t) {
  auto key = std::make_tuple(static_cast<int>(t.kind), t.size, t.base, t.nelems, t.params);
  if (t.kind != TypeKind::Struct && t.kind != TypeKind::Union && t.kind != TypeKind::Enum) {
    auto it = interned_.find(key);
    if (it != interned_.end()) return it->second;
  }
  storage_.push_back(std::move(t));
  TypeRef ref = &storage_.back();
  if (ref->kind != TypeKind::Struct && ref->kind != TypeKind::Union && ref->kind != TypeKind::Enum) {
    interned_.emplace(key, ref);
  }
  return ref;
}

TypeRef TypeTable::int_type(std::uint32_t size) {
  CType t;
  t.kind = TypeKind::Int;
  t.size = t.align = size;
  return intern(t);
}

TypeRef TypeTable::unsigned_type(std::uint32_t size) {
  CType t;
  t.kind = TypeKind::Unsigned;
  t.size = t.align = size;
  return intern(t);
}

TypeRef TypeTable::float_type(std::uint32_t size) {
  CType t;
  t.kind = TypeKind::Float;
  t.size = t.align = size;
  return intern(t);
}

TypeRef TypeTable::pointer_to(TypeRef base) {
  CType t;
  t.kind = TypeKind::Pointer;
  t.size = t.align = 4;
  t.base = base;
  return intern(t);
}

TypeRef TypeTable::array_of(TypeRef element, std::uint32_t nelems) {
  CType t;
  t.kind = TypeKind::Array;
  t.base = element;
  t.nelems = nelems;
  t.size = element->size * nelems;
  t.align = element->align;
  return intern(t);
}

TypeRef TypeTable::function(TypeRef result, std::vector<TypeRef> params) {
  CType t;
  t.kind = TypeKind::Function;
  t.base = result;
  t.params = std::move(params);
  t.size = 0;
  t.align = 1;
  return intern(t);
}

TypeRef TypeTable::qualified(TypeRef base, bool c, bool v) {
  // Canonical nesting is CONST(VOLATILE(T)).
  bool has_c = is_const(base);
  bool has_v = false;
  for (TypeRef t = base; t && (t->kind == TypeKind::Const || t->kind == TypeKind::Volatile); t = t->base) {
    if (t->kind == TypeKind::Volatile) has_v = true;
  }
  c = c || has_c;
  v = v || has_v;
  TypeRef core = unqual(base);
  if (core->kind == TypeKind::Array && (c || v)) {
    // Qualifiers on an array apply to its elements.
    return array_of(qualified(core->base, c, v), core->nelems);
  }
  TypeRef t = core;
  auto wrap = [&](TypeKind k) {
    CType q;
    q.kind = k;
    q.base = t;
    q.size = t->size;
    q.align = t->align;
    t = intern(q);
  };
  if (v) wrap(TypeKind::Volatile);
  if (c) wrap(TypeKind::Const);
  return t;
}

Record* TypeTable::new_record(bool is_union, std::string tag, Loc loc) {
  Record& r = records_.emplace_back();
  r.is_union = is_union;
  r.tag = std::move(tag);
  r.loc = loc;
  return &r;
}

EnumInfo* TypeTable::new_enum(std::string tag, Loc loc) {
  enums_.push_back(EnumInfo{std::move(tag), loc, {}});
  return &enums_.back();
}

TypeRef TypeTable::record_type(Record* r) {
  auto it = record_types_.find(r);
  if (it != record_types_.end()) return it->second;
  CType t;
  t.kind = r->is_union ? TypeKind::Union : TypeKind::Struct;
  t.record = r;
  t.size = r->size;
  t.align = r->align;
  storage_.push_back(std::move(t));
  record_types_.emplace(r, &storage_.back());
  return &storage_.back();
}

TypeRef TypeTable::enum_type(EnumInfo* e) {
  auto it = enum_types_.find(e);
  if (it != enum_types_.end()) return it->second;
  CType t;
  t.kind = TypeKind::Enum;
  t.enumeration = e;
  t.size = t.align = 4;
  storage_.push_back(std::move(t));
  enum_types_.emplace(e, &storage_.back());
  return &storage_.back();
}

void TypeTable::complete_record(Record* r, std::vector<FieldInfo> fields, Diagnostics& diags,
                                const std::string& file) {
  std::uint32_t offset = 0;
  std::uint32_t align = 1;
  std::uint32_t size = 0;
  // Bit fields pack LSB-first into 4-byte units.
  std::uint32_t unit_offset = 0;
  std::uint32_t unit_bits = 32;  // 32 = no open unit
  for (auto& f : fields) {
    if (f.bitsize != 0) {
      if (r->is_union) {
        f.offset = 0;
        f.lsb = 0;
      } else {
        if (unit_bits + f.bitsize > 32) {
          offset = align_up(offset, 4);
          unit_offset = offset;
          unit_bits = 0;
          offset += 4;
        }
        f.offset = unit_offset;
        f.lsb = unit_bits;
        unit_bits += f.bitsize;
      }
      align = std::max(align, 4u);
      size = std::max(size, f.offset + 4);
      continue;
    }
    unit_bits = 32;
    if (f.type->size == 0 && f.type->kind != TypeKind::Array) {
      diags.push_back({file, f.loc, "field '" + f.name + "' has incomplete type"});
    }
    if (r->is_union) {
      f.offset = 0;
    } else {
      offset = align_up(offset, f.type->align);
      f.offset = offset;
      offset += f.type->size;
    }
    align = std::max(align, f.type->align);
    size = std::max(size, f.offset + f.type->size);
  }
  r->fields = std::move(fields);
  r->align = align;
  r->size = align_up(size, align);
  r->complete = true;
  auto* t = const_cast<CType*>(record_type(r));
  t->size = r->size;
  t->align = r->align;
  // Qualified views of the record were interned while it was incomplete.
  for (auto& q : storage_) {
    if ((q.kind == TypeKind::Const || q.kind == TypeKind::Volatile) && unqual(&q) == t) {
      q.size = r->size;
      q.align = r->align;
    }
  }
}

TypeRef unqual(TypeRef t) {
  while (t && (t->kind == TypeKind::Const || t->kind == TypeKind::Volatile)) t = t->base;
  return t;
}

bool is_const(TypeRef t) {
  for (; t && (t->kind == TypeKind::Const || t->kind == TypeKind::Volatile); t = t->base) {
    if (t->kind == TypeKind::Const) return true;
  }
  return false;
}

bool is_integer(TypeRef t) {
  auto k = unqual(t)->kind;
  return k == TypeKind::Int || k == TypeKind::Unsigned || k == TypeKind::Enum;
}
bool is_floating(TypeRef t) { return unqual(t)->kind == TypeKind::Float; }
bool is_arithmetic(TypeRef t) { return is_integer(t) || is_floating(t); }
bool is_pointer(TypeRef t) { return unqual(t)->kind == TypeKind::Pointer; }
bool is_scalar(TypeRef t) { return is_arithmetic(t) || is_pointer(t); }
bool is_aggregate(TypeRef t) {
  auto k = unqual(t)->kind;
  return k == TypeKind::Struct || k == TypeKind::Union;
}
bool is_array(TypeRef t) { return unqual(t)->kind == TypeKind::Array; }
bool is_void(TypeRef t) { return unqual(t)->kind == TypeKind::Void; }
bool is_function(TypeRef t) { return unqual(t)->kind == TypeKind::Function; }
bool is_unsigned_int(TypeRef t) { return unqual(t)->kind == TypeKind::Unsigned; }

std::string type_name(TypeRef t) {
  if (!t) return "<null>";
  switch (t->kind) {
    case TypeKind::Void: return "void";
    case TypeKind::Int:
      return t->size == 1 ? "char" : t->size == 2 ? "short" : "int";
    case TypeKind::Unsigned:
      return t->size == 1 ? "unsigned char" : t->size == 2 ? "unsigned short" : "unsigned";
    case TypeKind::Float: return t->size == 4 ? "float" : "double";
    case TypeKind::Pointer: return type_name(t->base) + " *";
    case TypeKind::Array: return type_name(t->base) + "[" + std::to_string(t->nelems) + "]";
    case TypeKind::Struct: return "struct " + t->record->tag;
    case TypeKind::Union: return "union " + t->record->tag;
    case TypeKind::Enum: return "enum " + t->enumeration->tag;
    case TypeKind::Function: {
      std::string s = type_name(t->base) + " (";
      for (std::size_t i = 0; i < t->params.size(); ++i) {
        if (i) s += ", ";
        s += type_name(t->params[i]);
      }
      return s + ")";
    }
    case TypeKind::Const: return "const " + type_name(t->base);
    case TypeKind::Volatile: return "volatile " + type_name(t->base);
  }
  return "?";
}

}  // namespace cdb::minic
