#include "cdb/link/linker.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "cdb/codegen/codegen.hpp"

namespace cdb::link {

using codegen::Binding;
using codegen::Instr;
using codegen::ObjectModule;
using codegen::Op;
using codegen::SymKind;

namespace {

struct Definition {
  std::size_t unit = 0;
  std::uint32_t symbol = 0;
};

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return (v + a - 1) / a * a; }

std::string unit_label(const ObjectModule& om) { return fmt::format("{} ({:#010x})", om.source_file, om.uname); }

void put_word(Bytes& out, std::uint32_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

}  // namespace

ExecutableImage link(std::span<const ObjectModule> objects, const std::string& entry) {
  if (objects.empty()) throw LinkError("no object modules to link");

  std::map<std::uint32_t, std::size_t> by_uname;
  for (std::size_t u = 0; u < objects.size(); ++u) {
    auto [it, fresh] = by_uname.emplace(objects[u].uname, u);
    if (!fresh) {
      throw LinkError(fmt::format("uname {:#010x} is used by both {} and {}", objects[u].uname,
                                  objects[it->second].source_file, objects[u].source_file));
    }
  }

  ExecutableImage image;

  // Linker-owned words come first: the base shadow frame (all zero, so its
  // down link and uname terminate every chain) and _Nub_tos.
  image.sentinel_address = kDataBase;
  image.tos_address = kDataBase + codegen::kFrameHeaderSize;
  std::uint32_t data_size = codegen::kFrameHeaderSize + 4;

  std::vector<std::uint32_t> data_offset(objects.size());
  std::vector<std::uint32_t> function_base(objects.size());
  std::uint32_t nfunctions = 0;
  for (std::size_t u = 0; u < objects.size(); ++u) {
    const ObjectModule& om = objects[u];
    data_size = align_up(data_size, std::max<std::uint32_t>(om.data_align, 1));
    data_offset[u] = data_size;
    data_size += static_cast<std::uint32_t>(om.data.size());
    function_base[u] = nfunctions;
    nfunctions += static_cast<std::uint32_t>(om.functions.size());
  }

  auto defined_address = [&](std::size_t u, std::uint32_t s) -> std::uint32_t {
    const auto& sym = objects[u].symbols[s];
    if (sym.kind == SymKind::Function) {
      if (sym.value >= objects[u].functions.size()) {
        throw LinkError(fmt::format("{}: function symbol '{}' out of range", unit_label(objects[u]), sym.name));
      }
      return function_address(function_base[u] + sym.value);
    }
    if (static_cast<std::uint64_t>(sym.value) + sym.size > objects[u].data.size()) {
      throw LinkError(fmt::format("{}: data symbol '{}' out of range", unit_label(objects[u]), sym.name));
    }
    return kDataBase + data_offset[u] + sym.value;
  };

  std::map<std::string, Definition> globals;
  for (std::size_t u = 0; u < objects.size(); ++u) {
    for (std::uint32_t s = 0; s < objects[u].symbols.size(); ++s) {
      const auto& sym = objects[u].symbols[s];
      if (sym.binding != Binding::Global) continue;
      if (sym.name == codegen::kNubTos) {
        throw LinkError(fmt::format("{}: '{}' is reserved for the linker", unit_label(objects[u]), sym.name));
      }
      auto [it, fresh] = globals.emplace(sym.name, Definition{u, s});
      if (!fresh) {
        throw LinkError(fmt::format("duplicate symbol '{}' defined in {} and {}", sym.name,
                                    unit_label(objects[it->second.unit]), unit_label(objects[u])));
      }
    }
  }

  // Per-unit symbol resolution: address plus kind.
  std::vector<std::vector<std::uint32_t>> address(objects.size());
  for (std::size_t u = 0; u < objects.size(); ++u) {
    const ObjectModule& om = objects[u];
    address[u].resize(om.symbols.size());
    for (std::uint32_t s = 0; s < om.symbols.size(); ++s) {
      const auto& sym = om.symbols[s];
      if (sym.binding != Binding::Undefined) {
        address[u][s] = defined_address(u, s);
        continue;
      }
      if (sym.name == codegen::kNubTos) {
        address[u][s] = image.tos_address;
        continue;
      }
      auto it = globals.find(sym.name);
      if (it == globals.end()) {
        throw LinkError(fmt::format("undefined symbol '{}' referenced in {}", sym.name, unit_label(om)));
      }
      const auto& def = objects[it->second.unit].symbols[it->second.symbol];
      if (def.kind != sym.kind) {
        throw LinkError(fmt::format("symbol '{}' is {} in {} but {} in {}", sym.name,
                                    def.kind == SymKind::Function ? "a function" : "data",
                                    unit_label(objects[it->second.unit]),
                                    sym.kind == SymKind::Function ? "a function" : "data", unit_label(om)));
      }
      address[u][s] = defined_address(it->second.unit, it->second.symbol);
    }
  }

  image.data.assign(data_size, std::byte{0});
  put_word(image.data, image.tos_address - kDataBase, image.sentinel_address);

  for (std::size_t u = 0; u < objects.size(); ++u) {
    const ObjectModule& om = objects[u];
    std::copy(om.data.begin(), om.data.end(), image.data.begin() + data_offset[u]);
    for (const auto& rel : om.relocs) {
      if (rel.symbol >= om.symbols.size() || rel.offset + 4 > om.data.size()) {
        throw LinkError(fmt::format("{}: relocation out of range", unit_label(om)));
      }
      put_word(image.data, data_offset[u] + rel.offset, address[u][rel.symbol] + static_cast<std::uint32_t>(rel.addend));
    }
    for (const auto& f : om.functions) {
      ImageFunction out;
      out.name = om.symbols.at(f.symbol).name;
      out.uname = om.uname;
      out.frame_size = f.frame_size;
      out.params = f.params;
      out.returns_value = f.returns_value;
      out.code = f.code;
      for (Instr& i : out.code) {
        if (i.op == Op::AddrGlobal) {
          if (static_cast<std::size_t>(i.a) >= om.symbols.size()) {
            throw LinkError(fmt::format("{}: address of unknown symbol {}", unit_label(om), i.a));
          }
          i = Instr{Op::PushI, 0, static_cast<std::int64_t>(static_cast<std::uint32_t>(address[u][i.a] + i.b))};
        } else if (i.op == Op::Call) {
          if (static_cast<std::size_t>(i.a) >= om.symbols.size()) {
            throw LinkError(fmt::format("{}: call to unknown symbol {}", unit_label(om), i.a));
          }
          std::uint32_t target = address[u][i.a];
          if (target < kCodeBase) {
            throw LinkError(fmt::format("{}: call to data symbol '{}'", unit_label(om), om.symbols[i.a].name));
          }
          i.a = static_cast<std::int32_t>(target - kCodeBase);
        }
      }
      image.functions.push_back(std::move(out));
    }
  }

  auto main_it = globals.find(entry);
  if (main_it == globals.end() || objects[main_it->second.unit].symbols[main_it->second.symbol].kind != SymKind::Function) {
    throw LinkError(fmt::format("entry function '{}' is not defined", entry));
  }
  image.entry = address[main_it->second.unit][main_it->second.symbol] - kCodeBase;

  // _Nub_modules: records, terminator, then the address vectors.
  std::uint32_t vector_at = static_cast<std::uint32_t>((objects.size() + 1) * kModuleRecordSize);
  image.metadata.resize(vector_at);
  for (std::size_t u = 0; u < objects.size(); ++u) {
    const ObjectModule& om = objects[u];
    auto rec = codegen::emit_module_record(
        om,
        [&](std::uint32_t s) {
          if (s >= address[u].size()) throw LinkError(fmt::format("{}: bad address plan entry", unit_label(om)));
          return address[u][s];
        },
        static_cast<std::uint32_t>(image.metadata.size()));
    std::uint32_t record_at = static_cast<std::uint32_t>(u * kModuleRecordSize);
    std::copy(rec.record.begin(), rec.record.end(), image.metadata.begin() + record_at);
    image.metadata.insert(image.metadata.end(), rec.vector.begin(), rec.vector.end());

    ImageUnit iu;
    iu.uname = om.uname;
    iu.source_file = om.source_file;
    iu.symfile = om.symfile_name;
    iu.spoint_count = om.spoint_count;
    iu.record_address = record_at;
    iu.data_address = kDataBase + data_offset[u];
    iu.instrumented = om.instrumented;
    image.units.push_back(std::move(iu));
    image.bpflags_size = std::max(image.bpflags_size, om.spoint_count);
  }
  return image;
}

}  // namespace cdb::link
