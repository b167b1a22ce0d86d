#pragma once

#include <memory>
#include <unordered_map>

#include "cdb/sym/model.hpp"

namespace cdb::sym {

// Read-only uid lookup over a module. The module is shared so indexes can
// outlive the code that loaded it.
class SymbolIndex {
 public:
  explicit SymbolIndex(std::shared_ptr<const Module> module);
  explicit SymbolIndex(Module module) : SymbolIndex(std::make_shared<const Module>(std::move(module))) {}

  const Module& module() const { return *module_; }
  const std::shared_ptr<const Module>& shared() const { return module_; }
  std::uint32_t uname() const { return module_->uname; }

  const Item* find(Uid uid) const;
  const Symbol* symbol(Uid uid) const;
  const Type* type(Uid uid) const;

  // Throwing variants for uids that validation guarantees to exist.
  const Symbol& symbol_at(Uid uid) const;
  const Type& type_at(Uid uid) const;

  // Follows CONST/VOLATILE to the unqualified type.
  const Type& unqualified(Uid uid) const;

 private:
  std::shared_ptr<const Module> module_;
  std::unordered_map<Uid, const Item*> items_;
};

}  // namespace cdb::sym
