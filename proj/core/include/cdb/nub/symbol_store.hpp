#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cdb/link/image.hpp"
#include "cdb/sym/index.hpp"

namespace cdb::nub {

// Symbol tables by uname, in link order.
class SymbolStore {
 public:
  virtual ~SymbolStore() = default;
  virtual std::vector<std::uint32_t> unames() const = 0;
  // Null when the unit's symbol table is unavailable.
  virtual const sym::SymbolIndex* find(std::uint32_t uname) = 0;

  std::vector<const sym::SymbolIndex*> all();
};

// Loads symbol files named by an image's manifest, relative to dir, on
// first use. Unreadable files are remembered in problems().
class ManifestStore final : public SymbolStore {
 public:
  ManifestStore(const link::ExecutableImage& image, std::filesystem::path dir);
  std::vector<std::uint32_t> unames() const override { return order_; }
  const sym::SymbolIndex* find(std::uint32_t uname) override;
  const std::map<std::uint32_t, std::string>& problems() const { return problems_; }
  std::filesystem::path path_of(std::uint32_t uname) const;

 private:
  std::vector<std::uint32_t> order_;
  std::map<std::uint32_t, std::string> files_;
  std::filesystem::path dir_;
  std::map<std::uint32_t, std::unique_ptr<sym::SymbolIndex>> loaded_;
  std::map<std::uint32_t, std::string> problems_;
};

class MemoryStore final : public SymbolStore {
 public:
  void add(sym::Module m);
  std::vector<std::uint32_t> unames() const override { return order_; }
  const sym::SymbolIndex* find(std::uint32_t uname) override;

 private:
  std::vector<std::uint32_t> order_;
  std::map<std::uint32_t, std::unique_ptr<sym::SymbolIndex>> modules_;
};

}  // namespace cdb::nub
