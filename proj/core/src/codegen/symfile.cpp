#include <algorithm>
#include <deque>

#include "cdb/codegen/codegen.hpp"
#include "cdb/sym/construct.hpp"

namespace cdb::codegen {

using minic::Decl;
using minic::DeclKind;
using minic::TypeKind;
using minic::TypeRef;

std::vector<const Decl*> address_plan(const minic::TypedUnit& unit) {
  std::vector<const Decl*> plan;
  for (auto it = unit.file_symbols.rbegin(); it != unit.file_symbols.rend(); ++it) {
    const Decl* d = *it;
    if (d->kind == DeclKind::Function || d->kind == DeclKind::Variable) plan.push_back(d);
  }
  for (const Decl* d : unit.local_statics) plan.push_back(d);
  return plan;
}

namespace {

class SymfileBuilder {
 public:
  SymfileBuilder(const minic::TypedUnit& unit, std::uint32_t uname) : unit_(unit), uname_(uname) {}

  SymfileResult run(const minic::StopPlan& plan) {
    SymfileResult out;
    out.module.file = unit_.file;
    out.module.uname = uname_;

    std::vector<const Decl*> symbols(unit_.file_symbols.begin(), unit_.file_symbols.end());
    for (const Decl& d : unit_.decls) {
      if (!d.file_scope) symbols.push_back(&d);
    }
    for (const Decl* d : symbols) uids_[d] = next_uid_++;
    for (std::size_t i = 0; i < unit_.file_symbols.size(); ++i) {
      index_.emplace(unit_.file_symbols[i], 0);
    }
    auto plan_order = address_plan(unit_);
    for (std::size_t i = 0; i < plan_order.size(); ++i) index_[plan_order[i]] = static_cast<std::uint32_t>(i);

    file_tail_ = unit_.file_symbols.empty() ? sym::kNoUid : uids_.at(unit_.file_symbols.back());

    std::vector<sym::Item> items;
    for (const Decl* d : symbols) items.push_back(sym::make_item(symbol(*d)));
    while (!pending_.empty()) {
      TypeRef t = pending_.front();
      pending_.pop_front();
      Uid uid = type_uids_.at(t);
      items.push_back(sym::make_item(type(t), uid));
    }
    std::sort(items.begin(), items.end(), [](const sym::Item& a, const sym::Item& b) { return a.uid < b.uid; });
    out.module.items = std::move(items);
    out.module.nuids = next_uid_ - 1;

    for (auto it = unit_.file_symbols.rbegin(); it != unit_.file_symbols.rend(); ++it) {
      if ((*it)->kind == DeclKind::Function || (*it)->kind == DeclKind::Variable) {
        out.module.globals = uids_.at(*it);
        break;
      }
    }
    for (const auto& p : plan) {
      out.module.spoints.push_back({coordinate(p.loc), p.tail ? uids_.at(p.tail) : file_tail_});
    }
    out.uids = std::move(uids_);
    return out;
  }

 private:
  using Uid = sym::Uid;

  sym::Coordinate coordinate(minic::Loc loc) const { return {unit_.file, loc.col, loc.line}; }

  Uid type_uid(TypeRef t) {
    auto it = type_uids_.find(t);
    if (it != type_uids_.end()) return it->second;
    Uid uid = next_uid_++;
    type_uids_.emplace(t, uid);
    pending_.push_back(t);
    return uid;
  }

  sym::Symbol symbol(const Decl& d) {
    sym::SymbolAttributes a;
    a.id = d.name;
    a.uid = uids_.at(&d);
    a.module = uname_;
    a.src = coordinate(d.loc);
    a.type = type_uid(d.type);
    if (d.file_scope) {
      a.uplink = d.uplink ? uids_.at(d.uplink) : sym::kNoUid;
    } else {
      a.uplink = d.uplink ? uids_.at(d.uplink) : file_tail_;
    }
    switch (d.kind) {
      case DeclKind::Function:
      case DeclKind::Variable:
        if (d.static_storage || d.kind == DeclKind::Function) {
          std::uint32_t index = index_.at(&d);
          return d.linkage == minic::Linkage::External ? sym::make_global(std::move(a), index)
                                                       : sym::make_static(std::move(a), index);
        }
        return sym::make_local(std::move(a), static_cast<std::int32_t>(d.frame_offset));
      case DeclKind::Parameter:
        return sym::make_param(std::move(a), static_cast<std::int32_t>(d.frame_offset));
      case DeclKind::Typedef:
        return sym::make_typedef(std::move(a));
      case DeclKind::EnumConstant:
        return sym::make_enumconst(std::move(a), d.enum_value);
    }
    throw Error("unreachable symbol kind");
  }

  sym::Type type(TypeRef t) {
    switch (t->kind) {
      case TypeKind::Void: return sym::make_void();
      case TypeKind::Int: return sym::make_int(t->size, t->align);
      case TypeKind::Unsigned: return sym::make_unsigned(t->size, t->align);
      case TypeKind::Float: return sym::make_float(t->size, t->align);
      case TypeKind::Pointer: return sym::make_pointer(t->size, t->align, type_uid(t->base));
      case TypeKind::Array: return sym::make_array(t->size, t->align, type_uid(t->base), t->nelems);
      case TypeKind::Enum: {
        std::vector<sym::EnumItem> ids;
        for (const auto& [id, value] : t->enumeration->items) ids.push_back({id, value});
        return sym::make_enum(t->size, t->align, t->enumeration->tag, std::move(ids));
      }
      case TypeKind::Struct:
      case TypeKind::Union: {
        std::vector<sym::Field> fields;
        for (const auto& f : t->record->fields) {
          fields.push_back(sym::make_field(f.name, type_uid(f.type), static_cast<std::int32_t>(f.offset), f.bitsize,
                                           f.lsb));
        }
        return t->kind == TypeKind::Struct ? sym::make_struct(t->size, t->align, t->record->tag, std::move(fields))
                                           : sym::make_union(t->size, t->align, t->record->tag, std::move(fields));
      }
      case TypeKind::Function: {
        Uid result = type_uid(t->base);
        std::vector<Uid> formals;
        for (TypeRef p : t->params) formals.push_back(type_uid(p));
        return sym::make_function(t->size, t->align, result, std::move(formals));
      }
      case TypeKind::Const: return sym::make_const(t->size, t->align, type_uid(t->base));
      case TypeKind::Volatile: return sym::make_volatile(t->size, t->align, type_uid(t->base));
    }
    throw Error("unreachable type kind");
  }

  const minic::TypedUnit& unit_;
  std::uint32_t uname_;
  Uid next_uid_ = 1;
  Uid file_tail_ = sym::kNoUid;
  std::map<const Decl*, Uid> uids_;
  std::map<const Decl*, std::uint32_t> index_;
  std::map<TypeRef, Uid> type_uids_;
  std::deque<TypeRef> pending_;
};

}  // namespace

SymfileResult emit_symfile(const minic::TypedUnit& unit, const minic::StopPlan& plan, std::uint32_t uname) {
  return SymfileBuilder(unit, uname).run(plan);
}

}  // namespace cdb::codegen
