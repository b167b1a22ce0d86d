#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdb/codegen/isa.hpp"
#include "cdb/support/bytes.hpp"

namespace cdb::codegen {

enum class SymKind : std::uint8_t { Function, Data };
enum class Binding : std::uint8_t { Local, Global, Undefined };

struct ObjSymbol {
  std::string name;
  SymKind kind = SymKind::Data;
  Binding binding = Binding::Undefined;
  std::uint32_t value = 0;  // function index, or data offset
  std::uint32_t size = 0;
  friend bool operator==(const ObjSymbol&, const ObjSymbol&) = default;
};

struct ParamSlot {
  std::uint32_t offset = 0;
  Mem mem = Mem::I32;
  friend bool operator==(const ParamSlot&, const ParamSlot&) = default;
};

struct ObjFunction {
  std::uint32_t symbol = 0;  // index into the object's symbol table
  std::uint32_t frame_size = 0;
  std::vector<ParamSlot> params;
  bool returns_value = false;
  std::vector<Instr> code;  // jump targets are indices into this vector
  friend bool operator==(const ObjFunction&, const ObjFunction&) = default;
};

// 4-byte absolute address of symbol + addend, stored at offset in data.
struct DataReloc {
  std::uint32_t offset = 0;
  std::uint32_t symbol = 0;
  std::int32_t addend = 0;
  friend bool operator==(const DataReloc&, const DataReloc&) = default;
};

struct ObjectModule {
  std::string source_file;
  std::uint32_t uname = 0;
  bool instrumented = true;
  std::vector<ObjSymbol> symbols;
  std::vector<ObjFunction> functions;
  Bytes data;
  std::uint32_t data_align = 8;
  std::vector<DataReloc> relocs;
  // Symbol indices whose addresses form the unit's address vector, in
  // STATIC/GLOBAL index order.
  std::vector<std::uint32_t> address_plan;
  std::uint32_t spoint_count = 0;
  std::string symfile_name;
  Bytes symfile;  // the unit's symbol-table pickle
  friend bool operator==(const ObjectModule&, const ObjectModule&) = default;
};

class ObjectFormatError : public Error {
 public:
  using Error::Error;
};

Bytes write_object(const ObjectModule& om);
ObjectModule read_object(std::span<const std::byte> bytes);

// Shared by object and image containers.
void put_code(ByteWriter& w, const std::vector<Instr>& code);
std::vector<Instr> get_code(ByteReader& r);

}  // namespace cdb::codegen
