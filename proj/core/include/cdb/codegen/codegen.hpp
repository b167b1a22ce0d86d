#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cdb/codegen/object.hpp"
#include "cdb/minic/sema.hpp"
#include "cdb/minic/stopplan.hpp"
#include "cdb/sym/model.hpp"

namespace cdb::codegen {

struct CodegenOptions {
  std::uint32_t uname = 0;
  // Off: no breakpoint checks, ip stores, or shadow frames. The symbol
  // table is still produced.
  bool instrument = true;
};

// Symbols that occupy the unit's address vector, in index order: file-scope
// functions and variables from the end of the file-scope chain backwards,
// then block-scope statics in declaration order.
std::vector<const minic::Decl*> address_plan(const minic::TypedUnit& unit);

struct SymfileResult {
  sym::Module module;
  std::map<const minic::Decl*, sym::Uid> uids;
};

SymfileResult emit_symfile(const minic::TypedUnit& unit, const minic::StopPlan& plan, std::uint32_t uname);

ObjectModule compile_unit(const minic::TypedUnit& unit, const minic::StopPlan& plan, const CodegenOptions& options);

// In-image module record {uname, address of the vector} followed by the
// address vector itself, as little-endian words.
struct ModuleRecord {
  Bytes record;  // 8 bytes
  Bytes vector;  // 4 bytes per entry
};

// address_of maps an object symbol index to its linked address; it throws
// for unresolved symbols.
ModuleRecord emit_module_record(const ObjectModule& om, const std::function<std::uint32_t(std::uint32_t)>& address_of,
                                std::uint32_t vector_address);

// Default unit name: FNV-1a of the file name and a nonce; never zero.
std::uint32_t make_uname(std::string_view file, std::string_view nonce);

// Front end plus code generation for one source text. Throws
// minic::CompileError with every diagnostic when the unit has errors.
struct CompiledUnit {
  minic::TypedUnit unit;
  minic::StopPlan plan;
  ObjectModule object;
};
CompiledUnit compile_source(std::string_view source, const std::string& file, const CodegenOptions& options);

}  // namespace cdb::codegen
