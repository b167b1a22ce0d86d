#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdb/minic/diagnostics.hpp"
#include "cdb/minic/types.hpp"

namespace cdb::minic {

struct Decl;
struct Expr;
struct TypeName;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
  IntLit,
  FloatLit,
  StringLit,
  Name,
  Unary,
  Binary,
  Logical,
  Assign,     // op set for compound assignment
  Call,
  Index,
  Member,     // arrow distinguishes -> from .
  IncDec,
  Cast,
  Sizeof,     // of type_name, or of lhs when type_name is null
  InitList,   // brace initializer; elements in args
  Convert,    // inserted by the type checker
};

enum class UnaryOp { Neg, Plus, Not, BitNot, Deref, AddrOf };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Shl, Shr, BitAnd, BitOr, BitXor, Lt, Le, Gt, Ge, Eq, Ne };
enum class LogicalOp { And, Or };
enum class Builtin { None, Getchar, Putchar, PrintInt };

const char* spelling(BinaryOp op);

struct Expr {
  ExprKind kind;
  Loc loc;  // first token

  std::int64_t int_value = 0;
  bool is_unsigned = false;  // IntLit
  double float_value = 0;
  std::string text;  // identifier, member name, or string literal contents
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  LogicalOp logical = LogicalOp::And;
  std::optional<BinaryOp> compound;  // Assign: a op= b
  bool increment = false;            // IncDec
  bool prefix = false;               // IncDec
  bool arrow = false;                // Member
  ExprPtr lhs;
  ExprPtr rhs;
  std::vector<ExprPtr> args;
  std::shared_ptr<TypeName> type_name;  // Cast, Sizeof

  // Filled in by the type checker.
  TypeRef type = nullptr;
  bool lvalue = false;
  Decl* decl = nullptr;
  const FieldInfo* field = nullptr;
  Builtin builtin = Builtin::None;
  int string_id = -1;
  TypeRef op_type = nullptr;  // operand type an arithmetic/compound op is computed in

  // Stopping point that precedes evaluation of this expression, or -1.
  int stop = -1;

  Expr(ExprKind k, Loc l) : kind(k), loc(l) {}
};

// Declaration syntax, resolved to types by the type checker.
struct RecordSpec;
struct EnumSpec;

enum class StorageClass { None, Static, Extern, Typedef };

struct TypeSpec {
  Loc loc;
  StorageClass storage = StorageClass::None;
  bool is_const = false;
  bool is_volatile = false;
  int n_void = 0, n_char = 0, n_short = 0, n_int = 0, n_long = 0;
  int n_unsigned = 0, n_signed = 0, n_float = 0, n_double = 0;
  std::string typedef_name;
  std::shared_ptr<RecordSpec> record;
  std::shared_ptr<EnumSpec> enumeration;
  bool any() const;
};

struct PointerLevel {
  bool is_const = false;
  bool is_volatile = false;
};

struct ParamSpec;

struct Declarator {
  std::string name;  // empty for abstract declarators
  Loc loc;
  std::vector<PointerLevel> pointers;
  bool is_array = false;
  ExprPtr array_size;  // null for []
  bool is_function = false;
  std::vector<ParamSpec> params;
};

struct ParamSpec {
  TypeSpec spec;
  Declarator decl;
};

struct TypeName {
  TypeSpec spec;
  Declarator decl;
};

struct FieldSpec {
  TypeSpec spec;
  Declarator decl;
  ExprPtr width;
};

struct RecordSpec {
  bool is_union = false;
  std::string tag;
  Loc loc;
  bool has_body = false;
  std::vector<FieldSpec> fields;
};

struct Enumerator {
  std::string name;
  Loc loc;
  ExprPtr value;
};

struct EnumSpec {
  std::string tag;
  Loc loc;
  bool has_body = false;
  std::vector<Enumerator> items;
};

struct InitDeclarator {
  Declarator decl;
  ExprPtr init;
  Decl* symbol = nullptr;
};

struct Declaration {
  Loc loc;
  TypeSpec spec;
  std::vector<InitDeclarator> declarators;
};

enum class StmtKind { Expr, Empty, Block, If, While, For, Return, Decl };

struct Stmt {
  StmtKind kind;
  Loc loc;
  ExprPtr expr;  // expression statement, condition, or return value
  ExprPtr init;  // for
  ExprPtr step;  // for
  StmtPtr then_body;
  StmtPtr else_body;
  std::vector<StmtPtr> body;  // block
  std::unique_ptr<Declaration> decl;
  Loc close;  // block '}'

  // Filled in by the type checker: last symbol declared before this
  // statement in its scope (nullptr means the file-scope tail).
  Decl* scope_tail = nullptr;
  // Stopping point owned by the statement itself (empty statement,
  // `return;`), or -1.
  int stop = -1;

  Stmt(StmtKind k, Loc l) : kind(k), loc(l) {}
};

struct FunctionInfo;

struct FunctionDef {
  TypeSpec spec;
  Declarator decl;
  StmtPtr body;
  Decl* symbol = nullptr;
  FunctionInfo* info = nullptr;
};

struct TopLevel {
  std::unique_ptr<Declaration> declaration;
  std::unique_ptr<FunctionDef> function;
};

struct TranslationUnit {
  std::string file;
  std::vector<TopLevel> items;
};

// Semantic entities.

enum class DeclKind { Variable, Parameter, Function, Typedef, EnumConstant };
enum class Linkage { None, Internal, External };

struct Decl {
  DeclKind kind = DeclKind::Variable;
  std::string name;
  Loc loc;
  TypeRef type = nullptr;
  bool file_scope = false;
  Linkage linkage = Linkage::None;
  bool defined = false;  // function body seen / variable storage allocated here
  bool static_storage = false;  // file-scope and block-scope static variables
  std::string link_name;        // object-file symbol for functions and static-storage variables
  std::int32_t enum_value = 0;

  // Previous symbol in this scope, or last symbol of the enclosing scope.
  // nullptr means the file-scope tail.
  Decl* uplink = nullptr;

  std::uint32_t frame_offset = 0;  // parameters and locals
  Expr* init = nullptr;            // initializer of a file-scope variable
  FunctionDef* definition = nullptr;
};

struct FunctionInfo {
  Decl* decl = nullptr;
  FunctionDef* def = nullptr;
  std::vector<Decl*> params;
  std::vector<Decl*> locals;  // every block-scope variable, in declaration order
  std::uint32_t frame_size = 0;
  Loc body_loc;
  Decl* entry_tail = nullptr;  // tail at the body's opening brace
  int entry_stop = -1;
};

}  // namespace cdb::minic
