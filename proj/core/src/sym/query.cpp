#include "cdb/sym/query.hpp"

#include <unordered_map>

#include "cdb/sym/errors.hpp"

namespace cdb::sym {

namespace {

template <typename Lookup>
std::vector<const Symbol*> walk_chain(Lookup&& symbol, Uid start, std::uint32_t nuids) {
  const Symbol* s = symbol(start);
  if (!s) throw LookupError("uid " + std::to_string(start) + " does not name a symbol");
  std::vector<const Symbol*> chain;
  while (s) {
    if (chain.size() > nuids) throw LookupError("uplink cycle at uid " + std::to_string(start));
    chain.push_back(s);
    if (s->uplink == kNoUid) break;
    s = symbol(s->uplink);
    if (!s) throw LookupError("dangling uplink in chain from uid " + std::to_string(start));
  }
  return chain;
}

}  // namespace

std::vector<const Symbol*> visible_chain(const SymbolIndex& index, Uid start) {
  return walk_chain([&](Uid u) { return index.symbol(u); }, start, index.module().nuids);
}

std::vector<const Symbol*> visible_chain(const Module& m, Uid start) {
  std::unordered_map<Uid, const Symbol*> symbols;
  for (const auto& item : m.items) {
    if (auto* s = item.symbol()) symbols.emplace(item.uid, s);
  }
  return walk_chain(
      [&](Uid u) -> const Symbol* {
        auto it = symbols.find(u);
        return it == symbols.end() ? nullptr : it->second;
      },
      start, m.nuids);
}

std::optional<NameMatch> lookup_name(std::string_view name, const SymbolIndex& context_module,
                                     Uid context, std::span<const SymbolIndex* const> all_modules) {
  if (context != kNoUid) {
    for (const auto* s : visible_chain(context_module, context)) {
      if (s->id == name) return NameMatch{s, &context_module};
    }
  }
  for (const auto* other : all_modules) {
    if (other == nullptr || other == &context_module) continue;
    if (other->uname() == context_module.uname()) continue;
    Uid g = other->module().globals;
    if (g == kNoUid) continue;
    for (const auto* s : visible_chain(*other, g)) {
      if (s->has_address_index() && s->id == name) return NameMatch{s, other};
    }
  }
  return std::nullopt;
}

bool coordinate_matches(const Coordinate& pattern, const Coordinate& c) {
  return (pattern.file.empty() || pattern.file == c.file) && (pattern.x == 0 || pattern.x == c.x) &&
         (pattern.y == 0 || pattern.y == c.y);
}

std::vector<SPointMatch> find_spoints(const Module& m, const Coordinate& pattern) {
  std::vector<SPointMatch> out;
  for (std::size_t i = 0; i < m.spoints.size(); ++i) {
    if (coordinate_matches(pattern, m.spoints[i].src)) out.push_back({i, &m.spoints[i]});
  }
  return out;
}

}  // namespace cdb::sym
