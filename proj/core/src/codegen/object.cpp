#include "cdb/codegen/object.hpp"

#include <cstring>

namespace cdb::codegen {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'N', 'I', 'O', 'B', 'J', '1'};
constexpr auto kMaxOp = static_cast<std::uint8_t>(Op::BpCheck);

template <typename E>
E get_enum(ByteReader& r, std::uint8_t max, const char* what) {
  std::uint8_t v = r.get_u8();
  if (v > max) throw ObjectFormatError(std::string("bad ") + what);
  return static_cast<E>(v);
}

}  // namespace

void put_code(ByteWriter& w, const std::vector<Instr>& code) {
  w.put_uleb(code.size());
  for (const Instr& i : code) {
    w.put_u8(static_cast<std::uint8_t>(i.op));
    w.put_sleb(i.a);
    w.put_sleb(i.b);
  }
}

std::vector<Instr> get_code(ByteReader& r) {
  std::uint64_t n = r.get_uleb();
  if (n > r.remaining()) throw ObjectFormatError("code length exceeds input");
  std::vector<Instr> code;
  code.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    Instr i;
    i.op = get_enum<Op>(r, kMaxOp, "opcode");
    i.a = r.get_sleb32();
    i.b = r.get_sleb();
    code.push_back(i);
  }
  return code;
}

Bytes write_object(const ObjectModule& om) {
  ByteWriter w;
  w.put_bytes(as_bytes(std::string_view(kMagic, sizeof kMagic)));
  w.put_string(om.source_file);
  w.put_u32le(om.uname);
  w.put_u8(om.instrumented ? 1 : 0);
  w.put_uleb(om.symbols.size());
  for (const ObjSymbol& s : om.symbols) {
    w.put_string(s.name);
    w.put_u8(static_cast<std::uint8_t>(s.kind));
    w.put_u8(static_cast<std::uint8_t>(s.binding));
    w.put_uleb(s.value);
    w.put_uleb(s.size);
  }
  w.put_uleb(om.functions.size());
  for (const ObjFunction& f : om.functions) {
    w.put_uleb(f.symbol);
    w.put_uleb(f.frame_size);
    w.put_uleb(f.params.size());
    for (const ParamSlot& p : f.params) {
      w.put_uleb(p.offset);
      w.put_u8(static_cast<std::uint8_t>(p.mem));
    }
    w.put_u8(f.returns_value ? 1 : 0);
    put_code(w, f.code);
  }
  w.put_uleb(om.data.size());
  w.put_bytes(om.data);
  w.put_uleb(om.data_align);
  w.put_uleb(om.relocs.size());
  for (const DataReloc& r : om.relocs) {
    w.put_uleb(r.offset);
    w.put_uleb(r.symbol);
    w.put_sleb(r.addend);
  }
  w.put_uleb(om.address_plan.size());
  for (std::uint32_t s : om.address_plan) w.put_uleb(s);
  w.put_uleb(om.spoint_count);
  w.put_string(om.symfile_name);
  w.put_uleb(om.symfile.size());
  w.put_bytes(om.symfile);
  Bytes out = w.take();
  ByteWriter tail(out);
  tail.put_u32le(crc32(out));
  return out;
}

ObjectModule read_object(std::span<const std::byte> bytes) {
  if (bytes.size() < sizeof kMagic + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ObjectFormatError("not an object file");
  }
  auto body = bytes.first(bytes.size() - 4);
  ByteReader trailer(bytes.last(4));
  if (trailer.get_u32le() != crc32(body)) throw ObjectFormatError("object checksum mismatch");
  try {
    ByteReader r(body);
    r.get_bytes(sizeof kMagic);
    ObjectModule om;
    om.source_file = r.get_string();
    om.uname = r.get_u32le();
    om.instrumented = r.get_u8() != 0;
    std::uint64_t nsym = r.get_uleb();
    for (std::uint64_t i = 0; i < nsym; ++i) {
      ObjSymbol s;
      s.name = r.get_string();
      s.kind = get_enum<SymKind>(r, 1, "symbol kind");
      s.binding = get_enum<Binding>(r, 2, "symbol binding");
      s.value = r.get_uleb32();
      s.size = r.get_uleb32();
      om.symbols.push_back(std::move(s));
    }
    std::uint64_t nfun = r.get_uleb();
    for (std::uint64_t i = 0; i < nfun; ++i) {
      ObjFunction f;
      f.symbol = r.get_uleb32();
      if (f.symbol >= om.symbols.size()) throw ObjectFormatError("function symbol out of range");
      f.frame_size = r.get_uleb32();
      std::uint64_t np = r.get_uleb();
      for (std::uint64_t k = 0; k < np; ++k) {
        ParamSlot p;
        p.offset = r.get_uleb32();
        p.mem = get_enum<Mem>(r, static_cast<std::uint8_t>(Mem::F64), "parameter width");
        f.params.push_back(p);
      }
      f.returns_value = r.get_u8() != 0;
      f.code = get_code(r);
      om.functions.push_back(std::move(f));
    }
    auto data = r.get_bytes(r.get_uleb());
    om.data.assign(data.begin(), data.end());
    om.data_align = r.get_uleb32();
    std::uint64_t nrel = r.get_uleb();
    for (std::uint64_t i = 0; i < nrel; ++i) {
      DataReloc rel;
      rel.offset = r.get_uleb32();
      rel.symbol = r.get_uleb32();
      rel.addend = r.get_sleb32();
      if (rel.symbol >= om.symbols.size() || rel.offset + 4 > om.data.size()) {
        throw ObjectFormatError("relocation out of range");
      }
      om.relocs.push_back(rel);
    }
    std::uint64_t nplan = r.get_uleb();
    for (std::uint64_t i = 0; i < nplan; ++i) {
      std::uint32_t s = r.get_uleb32();
      if (s >= om.symbols.size()) throw ObjectFormatError("address plan symbol out of range");
      om.address_plan.push_back(s);
    }
    om.spoint_count = r.get_uleb32();
    om.symfile_name = r.get_string();
    auto sf = r.get_bytes(r.get_uleb());
    om.symfile.assign(sf.begin(), sf.end());
    if (!r.at_end()) throw ObjectFormatError("trailing bytes in object file");
    return om;
  } catch (const TruncatedInput&) {
    throw ObjectFormatError("truncated object file");
  } catch (const MalformedInput& e) {
    throw ObjectFormatError(e.what());
  }
}

}  // namespace cdb::codegen
