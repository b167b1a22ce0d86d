#include "cdb/debugger/stats.hpp"

#include <fmt/format.h>

#include "cdb/sym/pickle.hpp"

namespace cdb::debugger {

using sym::ByteCategory;

StatsReport stats_report(const link::ExecutableImage& image, nub::SymbolStore& symbols) {
  StatsReport r;
  r.modules = image.units.size();
  for (const auto& u : image.units) {
    const auto* m = symbols.find(u.uname);
    if (!m) {
      r.absent.push_back(fmt::format("{} ({})", u.source_file, u.symfile));
      continue;
    }
    sym::ByteAccounting acct;
    r.symfile_bytes += sym::pickle(m->module(), &acct).size();
    r.bytes += acct;
  }
  std::uint64_t records = (image.units.size() + 1) * link::kModuleRecordSize;
  r.bytes.add(ByteCategory::module_records, records);
  r.bytes.add(ByteCategory::address_vectors, image.metadata.size() - records);
  r.bytes.add(ByteCategory::breakpoint_flags, image.bpflags_size);
  r.image_bytes = image.metadata.size() + image.bpflags_size;
  return r;
}

std::string StatsReport::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < sym::kByteCategoryCount; ++i) {
    auto c = static_cast<ByteCategory>(i);
    out += fmt::format("{:>10}  {}\n", bytes[c], sym::to_string(c));
  }
  out += fmt::format("{:>10}  total ({} in symbol files, {} in the image, {} modules)", bytes.total(), symfile_bytes,
                     image_bytes, modules);
  for (const auto& a : absent) out += fmt::format("\nabsent: {}", a);
  return out;
}

}  // namespace cdb::debugger
