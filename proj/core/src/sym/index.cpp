#include "cdb/sym/index.hpp"

#include "cdb/sym/errors.hpp"

namespace cdb::sym {

SymbolIndex::SymbolIndex(std::shared_ptr<const Module> module) : module_(std::move(module)) {
  items_.reserve(module_->items.size());
  for (const auto& item : module_->items) items_.emplace(item.uid, &item);
}

const Item* SymbolIndex::find(Uid uid) const {
  auto it = items_.find(uid);
  return it == items_.end() ? nullptr : it->second;
}

const Symbol* SymbolIndex::symbol(Uid uid) const {
  auto* item = find(uid);
  return item ? item->symbol() : nullptr;
}

const Type* SymbolIndex::type(Uid uid) const {
  auto* item = find(uid);
  return item ? item->type() : nullptr;
}

const Symbol& SymbolIndex::symbol_at(Uid uid) const {
  if (auto* s = symbol(uid)) return *s;
  throw LookupError("no symbol with uid " + std::to_string(uid));
}

const Type& SymbolIndex::type_at(Uid uid) const {
  if (auto* t = type(uid)) return *t;
  throw LookupError("no type with uid " + std::to_string(uid));
}

const Type& SymbolIndex::unqualified(Uid uid) const {
  const Type* t = &type_at(uid);
  for (std::uint32_t steps = 0; steps <= module_->nuids; ++steps) {
    if (auto* c = t->as<types::Const>()) {
      t = &type_at(c->type);
    } else if (auto* v = t->as<types::Volatile>()) {
      t = &type_at(v->type);
    } else {
      return *t;
    }
  }
  throw LookupError("qualifier cycle at type " + std::to_string(uid));
}

}  // namespace cdb::sym
