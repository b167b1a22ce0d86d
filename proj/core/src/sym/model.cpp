#include "cdb/sym/model.hpp"

#include <array>

#include "cdb/support/error.hpp"

namespace cdb::sym {

std::uint32_t Symbol::address_index() const {
  if (auto* s = as<symbols::Static>()) return s->index;
  if (auto* g = as<symbols::Global>()) return g->index;
  throw Error("symbol '" + id + "' has no address index");
}

const char* constructor_name(const TypeNode& node) {
  static constexpr std::array<const char*, 12> names = {
      "INT",   "UNSIGNED", "FLOAT", "VOID",     "POINTER", "ENUM",
      "STRUCT", "UNION",   "ARRAY", "FUNCTION", "CONST",   "VOLATILE"};
  return names[node.index()];
}

const char* constructor_name(const SymbolNode& node) {
  static constexpr std::array<const char*, 6> names = {"STATIC", "GLOBAL", "TYPEDEF",
                                                       "LOCAL",  "PARAM",  "ENUMCONST"};
  return names[node.index()];
}

}  // namespace cdb::sym
