#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdb/minic/ast.hpp"
#include "cdb/minic/types.hpp"

namespace cdb::minic {

// A unit after type checking. Owns the tree, the types, and every Decl.
struct TypedUnit {
  std::string file;
  TranslationUnit ast;
  std::unique_ptr<TypeTable> types = std::make_unique<TypeTable>();
  std::deque<Decl> decls;
  std::deque<FunctionInfo> function_storage;

  // File-scope symbols in chain order: typedefs and enumeration constants in
  // declaration order, then defined functions in definition order, then
  // defined variables in definition order. Each one's uplink is the previous
  // entry, so the last entry is the file-scope tail.
  std::vector<Decl*> file_symbols;
  std::vector<Decl*> local_statics;     // block-scope statics, declaration order
  std::vector<FunctionInfo*> functions;  // definitions in source order
  std::vector<Decl*> externals;          // referenced but defined elsewhere
  std::vector<std::string> strings;      // string literal contents, without the NUL

  Decl* file_tail() const { return file_symbols.empty() ? nullptr : file_symbols.back(); }
};

// Checks a parsed unit. Errors are appended to diags; when diags gains an
// error the returned unit must not be handed to later phases.
TypedUnit typecheck(TranslationUnit tu, Diagnostics& diags);

struct ConstValue {
  enum class Kind { Int, Float, Address };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  double f = 0;
  const Decl* symbol = nullptr;  // Address: variable or function
  int string_id = -1;            // Address: string literal
  std::int64_t addend = 0;       // Address: byte offset
};

// Evaluates a checked expression at compile time, or nullopt if it is not a
// constant. Addresses of static-storage objects and string literals count.
std::optional<ConstValue> eval_const(const Expr& e);

}  // namespace cdb::minic
