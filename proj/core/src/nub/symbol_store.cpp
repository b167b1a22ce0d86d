#include "cdb/nub/symbol_store.hpp"

#include "cdb/sym/pickle.hpp"

namespace cdb::nub {

std::vector<const sym::SymbolIndex*> SymbolStore::all() {
  std::vector<const sym::SymbolIndex*> out;
  for (std::uint32_t u : unames()) {
    if (const auto* m = find(u)) out.push_back(m);
  }
  return out;
}

ManifestStore::ManifestStore(const link::ExecutableImage& image, std::filesystem::path dir) : dir_(std::move(dir)) {
  for (const auto& u : image.units) {
    order_.push_back(u.uname);
    files_[u.uname] = u.symfile;
  }
}

std::filesystem::path ManifestStore::path_of(std::uint32_t uname) const {
  auto it = files_.find(uname);
  return it == files_.end() ? std::filesystem::path{} : dir_ / it->second;
}

const sym::SymbolIndex* ManifestStore::find(std::uint32_t uname) {
  if (auto it = loaded_.find(uname); it != loaded_.end()) return it->second.get();
  if (problems_.count(uname) || !files_.count(uname)) return nullptr;
  try {
    sym::Module m = sym::unpickle(read_file(path_of(uname).string()));
    if (m.uname != uname) throw Error("symbol file names a different unit");
    auto& slot = loaded_[uname];
    slot = std::make_unique<sym::SymbolIndex>(std::move(m));
    return slot.get();
  } catch (const Error& e) {
    problems_[uname] = e.what();
    return nullptr;
  }
}

void MemoryStore::add(sym::Module m) {
  std::uint32_t u = m.uname;
  if (!modules_.count(u)) order_.push_back(u);
  modules_[u] = std::make_unique<sym::SymbolIndex>(std::move(m));
}

const sym::SymbolIndex* MemoryStore::find(std::uint32_t uname) {
  auto it = modules_.find(uname);
  return it == modules_.end() ? nullptr : it->second.get();
}

}  // namespace cdb::nub
