#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdb/link/image.hpp"
#include "cdb/nub/symbol_store.hpp"
#include "cdb/sym/accounting.hpp"

namespace cdb::debugger {

// Bytes of debugging data by category: symbol files plus the in-image
// module records, address vectors and breakpoint flags.
struct StatsReport {
  sym::ByteAccounting bytes;
  std::uint64_t symfile_bytes = 0;
  std::uint64_t image_bytes = 0;
  std::size_t modules = 0;
  std::vector<std::string> absent;  // units whose symbol file is unavailable

  std::string to_text() const;
};

StatsReport stats_report(const link::ExecutableImage& image, nub::SymbolStore& symbols);

}  // namespace cdb::debugger
