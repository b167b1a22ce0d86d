#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cdb/sym/index.hpp"

namespace cdb::sym {

// The start symbol followed by its uplink ancestors. Throws LookupError when
// start is not a symbol of the module.
std::vector<const Symbol*> visible_chain(const SymbolIndex& index, Uid start);
std::vector<const Symbol*> visible_chain(const Module& m, Uid start);

struct NameMatch {
  const Symbol* symbol = nullptr;
  const SymbolIndex* module = nullptr;
};

// First match on the context's visible chain wins; otherwise the globals
// chains of the other modules are searched for a STATIC or GLOBAL symbol.
std::optional<NameMatch> lookup_name(std::string_view name, const SymbolIndex& context_module,
                                     Uid context, std::span<const SymbolIndex* const> all_modules);

// Empty file, x == 0 and y == 0 in the pattern match anything.
bool coordinate_matches(const Coordinate& pattern, const Coordinate& c);

struct SPointMatch {
  std::size_t index = 0;
  const SPoint* spoint = nullptr;
};

std::vector<SPointMatch> find_spoints(const Module& m, const Coordinate& pattern);

}  // namespace cdb::sym
