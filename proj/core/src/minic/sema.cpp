#include "cdb/minic/sema.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

namespace cdb::minic {

namespace {

constexpr std::uint32_t kFrameHeader = 20;  // up, down, func, module, ip

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return a <= 1 ? v : (v + a - 1) / a * a; }

bool is_builtin_name(const std::string& n, Builtin* which = nullptr) {
  Builtin b = n == "getchar" ? Builtin::Getchar
              : n == "putchar" ? Builtin::Putchar
              : n == "print_int" ? Builtin::PrintInt
                                 : Builtin::None;
  if (which) *which = b;
  return b != Builtin::None;
}

// Normalizes v to the representation of integer-like type t.
std::int64_t normalize(std::int64_t v, TypeRef t) {
  t = unqual(t);
  std::uint32_t size = t->kind == TypeKind::Pointer ? 4 : t->size;
  if (size == 0 || size >= 8) return v;
  int bits = static_cast<int>(size * 8);
  std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
  if (t->kind == TypeKind::Unsigned || t->kind == TypeKind::Pointer) return static_cast<std::int64_t>(u);
  std::uint64_t sign = std::uint64_t{1} << (bits - 1);
  return static_cast<std::int64_t>((u ^ sign) - sign);
}

struct Scope {
  std::map<std::string, Decl*> names;
  std::map<std::string, Record*> records;
  std::map<std::string, EnumInfo*> enums;
  Decl* tail = nullptr;
};

class Checker {
 public:
  Checker(TypedUnit& u, Diagnostics& diags) : u_(u), diags_(diags), types_(*u.types) {}

  void run() {
    scopes_.emplace_back();
    for (auto& item : u_.ast.items) {
      if (item.declaration) file_declaration(*item.declaration);
      if (item.function) function_definition(*item.function);
    }
    finish();
  }

 private:
  // Diagnostics.
  void error(Loc loc, std::string msg) { diags_.push_back({u_.file, loc, std::move(msg)}); }

  bool at_file_scope() const { return scopes_.size() == 1; }

  Decl* new_decl(DeclKind kind, const std::string& name, Loc loc, TypeRef type) {
    Decl& d = u_.decls.emplace_back();
    d.kind = kind;
    d.name = name;
    d.loc = loc;
    d.type = type;
    d.file_scope = at_file_scope();
    return &d;
  }

  // Adds d to the innermost scope. Block-scope symbols join the uplink chain.
  void bind(Decl* d) {
    Scope& s = scopes_.back();
    s.names[d->name] = d;
    if (!at_file_scope()) {
      d->uplink = s.tail;
      s.tail = d;
    }
  }

  Decl* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->names.find(name);
      if (f != it->names.end()) return f->second;
    }
    return nullptr;
  }

  void check_redeclaration(const std::string& name, Loc loc) {
    auto& names = scopes_.back().names;
    if (names.count(name)) error(loc, fmt::format("redefinition of '{}'", name));
  }

  // Types from declaration syntax.
  TypeRef base_type(const TypeSpec& s) {
    TypeRef t = nullptr;
    if (s.record) {
      t = record(*s.record);
    } else if (s.enumeration) {
      t = enumeration(*s.enumeration);
    } else if (!s.typedef_name.empty()) {
      Decl* d = lookup(s.typedef_name);
      t = d && d->kind == DeclKind::Typedef ? d->type : types_.int_type();
    } else {
      t = arithmetic_type(s);
    }
    if (s.n_void + s.n_char + s.n_short + s.n_int + s.n_long + s.n_unsigned + s.n_signed + s.n_float + s.n_double > 0 &&
        (s.record || s.enumeration || !s.typedef_name.empty())) {
      error(s.loc, "two or more data types in declaration specifiers");
    }
    return types_.qualified(t, s.is_const, s.is_volatile);
  }

  TypeRef arithmetic_type(const TypeSpec& s) {
    int ints = s.n_char + s.n_short + s.n_int + s.n_long + s.n_unsigned + s.n_signed;
    if (s.n_void) {
      if (ints + s.n_float + s.n_double + s.n_void > 1) error(s.loc, "invalid type specifier combination");
      return types_.void_type();
    }
    if (s.n_float) {
      if (ints + s.n_double + s.n_float > 1) error(s.loc, "invalid type specifier combination");
      return types_.float_type(4);
    }
    if (s.n_double) {
      if (ints - s.n_long + s.n_double > 1 || s.n_long > 1) error(s.loc, "invalid type specifier combination");
      return types_.float_type(8);
    }
    if (ints == 0) {
      error(s.loc, "missing type specifier");
      return types_.int_type();
    }
    if (s.n_unsigned && s.n_signed) error(s.loc, "both 'signed' and 'unsigned' in declaration specifiers");
    if (s.n_long > 1) error(s.loc, "'long long' is not supported");
    if (s.n_char + s.n_short + s.n_long > 1 || s.n_int > 1 || s.n_unsigned > 1 || s.n_signed > 1 ||
        (s.n_char && s.n_int)) {
      error(s.loc, "invalid type specifier combination");
    }
    std::uint32_t size = s.n_char ? 1 : s.n_short ? 2 : 4;
    return s.n_unsigned ? types_.unsigned_type(size) : types_.int_type(size);
  }

  TypeRef record(const RecordSpec& r) {
    if (auto it = resolved_records_.find(&r); it != resolved_records_.end()) return it->second;
    TypeRef result = nullptr;
    if (r.has_body) {
      Record* rec = nullptr;
      if (!r.tag.empty()) {
        auto& tags = scopes_.back().records;
        if (auto it = tags.find(r.tag); it != tags.end()) {
          rec = it->second;
          if (rec->complete) {
            error(r.loc, fmt::format("redefinition of '{} {}'", r.is_union ? "union" : "struct", r.tag));
            rec = nullptr;
          } else if (rec->is_union != r.is_union) {
            error(r.loc, fmt::format("'{}' defined as wrong kind of tag", r.tag));
          }
        }
      }
      if (!rec) {
        rec = types_.new_record(r.is_union, r.tag, r.loc);
        if (!r.tag.empty()) scopes_.back().records[r.tag] = rec;
      }
      // Fields may refer to the record itself through pointers.
      result = types_.record_type(rec);
      resolved_records_[&r] = result;
      std::vector<FieldInfo> fields;
      std::set<std::string> seen;
      for (const auto& f : r.fields) {
        FieldInfo fi;
        fi.name = f.decl.name;
        fi.loc = f.decl.loc;
        bool unsized = false;
        fi.type = declarator_type(base_type(f.spec), f.decl, unsized);
        if (fi.name.empty()) {
          error(f.decl.loc, "unnamed fields are not supported");
          continue;
        }
        if (!seen.insert(fi.name).second) error(fi.loc, fmt::format("duplicate member '{}'", fi.name));
        if (unsized) error(fi.loc, fmt::format("field '{}' has incomplete array type", fi.name));
        if (is_function(fi.type)) {
          error(fi.loc, fmt::format("field '{}' declared as a function", fi.name));
          continue;
        }
        if (f.width) {
          auto w = int_constant(const_cast<ExprPtr&>(f.width));
          TypeRef ut = unqual(fi.type);
          if ((ut->kind != TypeKind::Int && ut->kind != TypeKind::Unsigned) || ut->size != 4) {
            error(fi.loc, fmt::format("bit-field '{}' must have type int or unsigned", fi.name));
          } else if (!w || *w < 1 || *w > 32) {
            error(f.width->loc, fmt::format("invalid width for bit-field '{}'", fi.name));
          } else {
            fi.bitsize = static_cast<std::uint32_t>(*w);
          }
        }
        fields.push_back(std::move(fi));
      }
      types_.complete_record(rec, std::move(fields), diags_, u_.file);
      return result;
    }
    Record* rec = nullptr;
    for (auto it = scopes_.rbegin(); it != scopes_.rend() && !rec; ++it) {
      if (auto f = it->records.find(r.tag); f != it->records.end()) rec = f->second;
    }
    if (!rec) {
      rec = types_.new_record(r.is_union, r.tag, r.loc);
      scopes_.back().records[r.tag] = rec;
    } else if (rec->is_union != r.is_union) {
      error(r.loc, fmt::format("'{}' defined as wrong kind of tag", r.tag));
    }
    result = types_.record_type(rec);
    resolved_records_[&r] = result;
    return result;
  }

  TypeRef enumeration(const EnumSpec& e) {
    if (auto it = resolved_enums_.find(&e); it != resolved_enums_.end()) return it->second;
    EnumInfo* info = nullptr;
    if (!e.tag.empty()) {
      for (auto it = scopes_.rbegin(); it != scopes_.rend() && !info; ++it) {
        if (auto f = it->enums.find(e.tag); f != it->enums.end()) info = f->second;
      }
      if (info && e.has_body && !scopes_.back().enums.count(e.tag)) info = nullptr;
      if (info && e.has_body && !info->items.empty()) {
        error(e.loc, fmt::format("redefinition of 'enum {}'", e.tag));
        info = nullptr;
      }
    }
    if (!info) {
      if (!e.has_body && !e.tag.empty()) error(e.loc, fmt::format("use of undefined enum '{}'", e.tag));
      info = types_.new_enum(e.tag, e.loc);
      if (!e.tag.empty()) scopes_.back().enums[e.tag] = info;
    }
    TypeRef t = types_.enum_type(info);
    resolved_enums_[&e] = t;
    if (e.has_body) {
      std::int64_t next = 0;
      for (const auto& item : e.items) {
        if (item.value) {
          if (auto v = int_constant(const_cast<ExprPtr&>(item.value))) next = *v;
          else error(item.value->loc, "enumerator value is not an integer constant");
        }
        if (next < INT32_MIN || next > INT32_MAX) error(item.loc, "enumerator value out of range");
        auto value = static_cast<std::int32_t>(next);
        info->items.emplace_back(item.name, value);
        check_redeclaration(item.name, item.loc);
        Decl* d = new_decl(DeclKind::EnumConstant, item.name, item.loc, t);
        d->enum_value = value;
        bind(d);
        if (d->file_scope) file_types_.push_back(d);
        next = static_cast<std::int64_t>(value) + 1;
      }
      if (e.items.empty()) error(e.loc, "empty enum");
    }
    return t;
  }

  // Applies pointer, array, and function derivations. unsized reports `[]`.
  TypeRef declarator_type(TypeRef base, const Declarator& d, bool& unsized) {
    unsized = false;
    TypeRef t = base;
    for (const auto& p : d.pointers) t = types_.qualified(types_.pointer_to(t), p.is_const, p.is_volatile);
    if (d.is_array) {
      std::uint32_t n = 0;
      if (is_void(t) || is_function(t)) {
        error(d.loc, "array of invalid element type");
        t = types_.int_type();
      } else if (t->size == 0) {
        error(d.loc, "array has incomplete element type");
      }
      if (d.array_size) {
        auto v = int_constant(const_cast<ExprPtr&>(d.array_size));
        if (!v || *v <= 0) error(d.array_size->loc, "array size must be a positive integer constant");
        else n = static_cast<std::uint32_t>(*v);
      } else {
        unsized = true;
      }
      t = types_.array_of(t, n);
    }
    if (d.is_function) {
      if (is_array(t) || is_function(t)) error(d.loc, "function cannot return an array or function");
      if (is_aggregate(t)) error(d.loc, "struct and union return values are not supported");
      std::vector<TypeRef> params;
      for (const auto& p : d.params) params.push_back(param_type(p));
      t = types_.function(t, std::move(params));
    }
    return t;
  }

  TypeRef param_type(const ParamSpec& p) {
    bool unsized = false;
    TypeRef t = declarator_type(base_type(p.spec), p.decl, unsized);
    if (is_array(t)) t = types_.pointer_to(unqual(t)->base);
    if (is_function(t)) {
      error(p.decl.loc, "function parameters are not supported");
      t = types_.int_type();
    }
    if (is_void(t)) {
      error(p.decl.loc, "parameter has void type");
      t = types_.int_type();
    }
    if (is_aggregate(t)) error(p.decl.loc, "struct and union parameters are not supported");
    return t;
  }

  // File-scope declarations.
  void file_declaration(Declaration& decl) {
    TypeRef base = base_type(decl.spec);
    for (auto& id : decl.declarators) {
      bool unsized = false;
      TypeRef t = declarator_type(base, id.decl, unsized);
      const std::string& name = id.decl.name;
      Loc loc = id.decl.loc;
      if (decl.spec.storage == StorageClass::Typedef) {
        check_redeclaration(name, loc);
        if (id.init) error(loc, fmt::format("typedef '{}' is initialized", name));
        Decl* d = new_decl(DeclKind::Typedef, name, loc, t);
        bind(d);
        file_types_.push_back(d);
        id.symbol = d;
        continue;
      }
      if (is_function(t)) {
        if (id.init) error(loc, fmt::format("function '{}' is initialized", name));
        id.symbol = declare_function(name, loc, t, decl.spec.storage == StorageClass::Static);
        continue;
      }
      if (is_void(t)) {
        error(loc, fmt::format("variable '{}' declared void", name));
        continue;
      }
      bool is_extern = decl.spec.storage == StorageClass::Extern;
      bool is_static = decl.spec.storage == StorageClass::Static;
      Decl* d = nullptr;
      auto& names = scopes_.back().names;
      if (auto it = names.find(name); it != names.end()) {
        d = it->second;
        if (d->kind != DeclKind::Variable) {
          error(loc, fmt::format("redefinition of '{}' as a different kind of symbol", name));
          continue;
        }
        TypeRef prev = d->type;
        bool same = prev == t || (is_array(prev) && is_array(t) && unqual(prev)->base == unqual(t)->base &&
                                  (unsized || unqual(prev)->nelems == 0));
        if (!same) error(loc, fmt::format("conflicting types for '{}'", name));
        if (is_static && d->linkage == Linkage::External) {
          error(loc, fmt::format("static declaration of '{}' follows non-static declaration", name));
        }
        if (id.init && d->init) error(loc, fmt::format("redefinition of '{}'", name));
        if (!unsized && is_array(t) && unqual(d->type)->nelems == 0) d->type = t;
      } else {
        d = new_decl(DeclKind::Variable, name, loc, t);
        d->static_storage = true;
        d->linkage = is_static ? Linkage::Internal : Linkage::External;
        d->link_name = name;
        bind(d);
      }
      id.symbol = d;
      if (id.init) {
        d->type = check_initializer(d->type, id.init, true);
        d->init = id.init.get();
      }
      if (!is_extern || id.init) {
        if (!d->defined) {
          d->defined = true;
          d->loc = loc;
          file_vars_.push_back(d);
        }
        if (is_array(d->type) && unqual(d->type)->nelems == 0) {
          error(loc, fmt::format("array size missing in '{}'", name));
        }
      }
    }
  }

  Decl* declare_function(const std::string& name, Loc loc, TypeRef t, bool is_static) {
    if (!at_file_scope()) {
      error(loc, "block-scope function declarations are not supported");
      return nullptr;
    }
    auto& names = scopes_.back().names;
    if (auto it = names.find(name); it != names.end()) {
      Decl* d = it->second;
      if (d->kind != DeclKind::Function) {
        error(loc, fmt::format("redefinition of '{}' as a different kind of symbol", name));
        return d;
      }
      if (d->type != t) error(loc, fmt::format("conflicting types for '{}'", name));
      if (is_static && d->linkage == Linkage::External) {
        error(loc, fmt::format("static declaration of '{}' follows non-static declaration", name));
      }
      return d;
    }
    Decl* d = new_decl(DeclKind::Function, name, loc, t);
    d->linkage = is_static ? Linkage::Internal : Linkage::External;
    d->link_name = name;
    bind(d);
    return d;
  }

  void function_definition(FunctionDef& fn) {
    TypeRef base = base_type(fn.spec);
    bool unsized = false;
    TypeRef t = declarator_type(base, fn.decl, unsized);
    if (!fn.decl.is_function || !is_function(t)) {
      error(fn.decl.loc, "expected a function declarator");
      return;
    }
    if (is_builtin_name(fn.decl.name)) error(fn.decl.loc, fmt::format("'{}' is a builtin function", fn.decl.name));
    if (fn.spec.storage == StorageClass::Typedef || fn.spec.storage == StorageClass::Extern) {
      error(fn.spec.loc, "invalid storage class for a function definition");
    }
    Decl* d = declare_function(fn.decl.name, fn.decl.loc, t, fn.spec.storage == StorageClass::Static);
    if (!d || d->kind != DeclKind::Function) return;
    if (d->defined) {
      error(fn.decl.loc, fmt::format("redefinition of '{}'", fn.decl.name));
      return;
    }
    d->defined = true;
    d->loc = fn.decl.loc;
    d->definition = &fn;
    file_functions_.push_back(d);

    FunctionInfo& info = u_.function_storage.emplace_back();
    info.decl = d;
    info.def = &fn;
    fn.symbol = d;
    fn.info = &info;
    u_.functions.push_back(&info);

    fn_ = &info;
    frame_offset_ = kFrameHeader;
    scopes_.emplace_back();
    scopes_.back().tail = nullptr;
    const auto& ptypes = unqual(t)->params;
    for (std::size_t i = 0; i < fn.decl.params.size(); ++i) {
      const auto& p = fn.decl.params[i];
      if (p.decl.name.empty()) {
        error(p.decl.loc, "parameter name omitted");
        continue;
      }
      check_redeclaration(p.decl.name, p.decl.loc);
      Decl* pd = new_decl(DeclKind::Parameter, p.decl.name, p.decl.loc, ptypes[i]);
      pd->frame_offset = allocate(pd->type);
      bind(pd);
      info.params.push_back(pd);
    }
    info.entry_tail = scopes_.back().tail;
    info.body_loc = fn.body->loc;
    check_stmt(*fn.body);
    scopes_.pop_back();
    info.frame_size = align_up(frame_offset_, 8);
    fn_ = nullptr;
  }

  std::uint32_t allocate(TypeRef t) {
    std::uint32_t off = align_up(frame_offset_, std::max<std::uint32_t>(t->align, 1));
    frame_offset_ = off + t->size;
    return off;
  }

  // Block-scope declarations.
  void local_declaration(Declaration& decl) {
    TypeRef base = base_type(decl.spec);
    for (auto& id : decl.declarators) {
      bool unsized = false;
      TypeRef t = declarator_type(base, id.decl, unsized);
      const std::string& name = id.decl.name;
      Loc loc = id.decl.loc;
      check_redeclaration(name, loc);
      if (decl.spec.storage == StorageClass::Typedef) {
        if (id.init) error(loc, fmt::format("typedef '{}' is initialized", name));
        Decl* d = new_decl(DeclKind::Typedef, name, loc, t);
        bind(d);
        id.symbol = d;
        continue;
      }
      if (is_function(t)) {
        error(loc, "block-scope function declarations are not supported");
        continue;
      }
      if (decl.spec.storage == StorageClass::Extern) {
        error(loc, "block-scope extern declarations are not supported");
        continue;
      }
      if (is_void(t)) {
        error(loc, fmt::format("variable '{}' declared void", name));
        continue;
      }
      bool is_static = decl.spec.storage == StorageClass::Static;
      Decl* d = new_decl(DeclKind::Variable, name, loc, t);
      d->defined = true;
      id.symbol = d;
      if (id.init) d->type = check_initializer(d->type, id.init, is_static);
      if (is_array(d->type) && unqual(d->type)->nelems == 0) error(loc, fmt::format("array size missing in '{}'", name));
      if (d->type->size == 0 && !is_array(d->type)) error(loc, fmt::format("variable '{}' has incomplete type", name));
      if (is_static) {
        d->static_storage = true;
        d->linkage = Linkage::Internal;
        d->link_name = fmt::format("{}.{}", name, ++static_counter_);
        d->init = id.init.get();
        u_.local_statics.push_back(d);
      } else {
        d->frame_offset = allocate(d->type);
        fn_->locals.push_back(d);
      }
      // The name is in scope from its declarator on, so initializer
      // stopping points see it.
      bind(d);
    }
  }

  // Statements.
  void check_stmt(Stmt& s) {
    s.scope_tail = scopes_.back().tail;
    switch (s.kind) {
      case StmtKind::Expr:
        check(s.expr);
        if (s.expr->type && is_function(s.expr->type)) error(s.expr->loc, "function designator used as value");
        break;
      case StmtKind::Empty:
        break;
      case StmtKind::Block: {
        Decl* tail = scopes_.back().tail;
        scopes_.emplace_back();
        scopes_.back().tail = tail;
        for (auto& b : s.body) check_stmt(*b);
        scopes_.pop_back();
        break;
      }
      case StmtKind::If:
        condition(s.expr);
        check_stmt(*s.then_body);
        if (s.else_body) check_stmt(*s.else_body);
        break;
      case StmtKind::While:
        condition(s.expr);
        check_stmt(*s.then_body);
        break;
      case StmtKind::For:
        if (s.init) check(s.init);
        if (s.expr) condition(s.expr);
        if (s.step) check(s.step);
        check_stmt(*s.then_body);
        break;
      case StmtKind::Return: {
        TypeRef result = unqual(fn_->decl->type)->base;
        if (s.expr) {
          if (is_void(result)) {
            check(s.expr);
            error(s.expr->loc, "void function should not return a value");
          } else {
            check(s.expr);
            assign_convert(s.expr, result, "return");
          }
        } else if (!is_void(result)) {
          error(s.loc, "non-void function should return a value");
        }
        break;
      }
      case StmtKind::Decl:
        local_declaration(*s.decl);
        break;
    }
  }

  void condition(ExprPtr& e) {
    check(e);
    TypeRef t = rvalue(e);
    if (!is_scalar(t)) error(e->loc, fmt::format("used type '{}' where a scalar is required", type_name(t)));
  }

  // Initializers. Returns t, with an unsized array completed from the
  // initializer.
  TypeRef check_initializer(TypeRef t, ExprPtr& init, bool constant) {
    TypeRef ut = unqual(t);
    if (ut->kind == TypeKind::Array) {
      TypeRef elem = ut->base;
      std::uint32_t n = ut->nelems;
      if (init->kind == ExprKind::StringLit && is_integer(elem) && unqual(elem)->size == 1) {
        check(init);
        std::uint32_t len = static_cast<std::uint32_t>(init->text.size()) + 1;
        if (n == 0) n = len;
        else if (len - 1 > n) error(init->loc, "initializer string is too long");
        return types_.array_of(elem, n);
      }
      if (init->kind != ExprKind::InitList) {
        error(init->loc, "array initializer must be a brace-enclosed list");
        return t;
      }
      init->type = t;
      for (auto& a : init->args) check_initializer(elem, a, constant);
      auto count = static_cast<std::uint32_t>(init->args.size());
      if (n == 0) n = count;
      else if (count > n) error(init->loc, "excess elements in array initializer");
      TypeRef sized = types_.array_of(elem, n);
      init->type = sized;
      return sized;
    }
    if (ut->kind == TypeKind::Struct || ut->kind == TypeKind::Union) {
      if (init->kind == ExprKind::InitList) {
        init->type = t;
        const auto& fields = ut->record->fields;
        std::size_t limit = ut->kind == TypeKind::Union ? std::min<std::size_t>(1, fields.size()) : fields.size();
        if (!ut->record->complete) error(init->loc, "initializer for incomplete type");
        if (init->args.size() > limit) error(init->loc, "excess elements in initializer");
        for (std::size_t i = 0; i < init->args.size() && i < limit; ++i) {
          check_initializer(fields[i].type, init->args[i], constant);
        }
        return t;
      }
      if (constant) {
        error(init->loc, "initializer element is not constant");
        return t;
      }
      check(init);
      assign_convert(init, t, "initialization");
      return t;
    }
    if (init->kind == ExprKind::InitList) {
      error(init->loc, "scalar initializer cannot be a list");
      return t;
    }
    check(init);
    assign_convert(init, t, "initialization");
    if (constant && !eval_const(*init)) error(init->loc, "initializer element is not constant");
    return t;
  }

  // Expressions.
  void wrap(ExprPtr& e, TypeRef to) {
    auto c = std::make_unique<Expr>(ExprKind::Convert, e->loc);
    c->type = to;
    c->lhs = std::move(e);
    e = std::move(c);
  }

  // Array-to-pointer decay; returns the unqualified value type.
  TypeRef rvalue(ExprPtr& e) {
    TypeRef t = unqual(e->type);
    if (t->kind == TypeKind::Array) {
      wrap(e, types_.pointer_to(t->base));
      return e->type;
    }
    if (t->kind == TypeKind::Function) {
      error(e->loc, "function designator used as value");
      e->type = types_.int_type();
      return e->type;
    }
    return t;
  }

  TypeRef value(ExprPtr& e) {
    check(e);
    return rvalue(e);
  }

  void convert(ExprPtr& e, TypeRef to) {
    to = unqual(to);
    if (unqual(e->type) != to || e->lvalue) wrap(e, to);
  }

  static bool is_null_constant(const Expr& e) {
    if (!is_integer(e.type)) return false;
    auto v = eval_const(e);
    return v && v->kind == ConstValue::Kind::Int && v->i == 0;
  }

  // e has been checked; converts it for assignment to a `to` object.
  void assign_convert(ExprPtr& e, TypeRef to, const char* what) {
    TypeRef from = rvalue(e);
    to = unqual(to);
    if (is_arithmetic(to) && is_arithmetic(from)) {
      convert(e, to);
    } else if (is_pointer(to) && is_pointer(from)) {
      convert(e, to);
    } else if (is_pointer(to) && is_null_constant(*e)) {
      convert(e, to);
    } else if (is_aggregate(to) && from == to) {
      // Structure copy.
    } else {
      error(e->loc, fmt::format("incompatible types in {}: '{}' to '{}'", what, type_name(from), type_name(to)));
    }
  }

  TypeRef promote(TypeRef t) {
    t = unqual(t);
    if (t->kind == TypeKind::Enum) return types_.int_type();
    if ((t->kind == TypeKind::Int || t->kind == TypeKind::Unsigned) && t->size < 4) return types_.int_type();
    return t;
  }

  TypeRef common(TypeRef a, TypeRef b) {
    a = unqual(a);
    b = unqual(b);
    if (is_floating(a) || is_floating(b)) {
      std::uint32_t size = std::max(is_floating(a) ? a->size : 0u, is_floating(b) ? b->size : 0u);
      return types_.float_type(size);
    }
    TypeRef pa = promote(a), pb = promote(b);
    if (pa->kind == TypeKind::Unsigned || pb->kind == TypeKind::Unsigned) return types_.unsigned_type();
    return types_.int_type();
  }

  bool complete_pointee(TypeRef ptr, Loc loc) {
    TypeRef base = unqual(unqual(ptr)->base);
    if (base->size == 0) {
      error(loc, fmt::format("arithmetic on a pointer to incomplete type '{}'", type_name(base)));
      return false;
    }
    return true;
  }

  bool require_modifiable(const Expr& e, const char* what) {
    if (!e.lvalue) {
      error(e.loc, fmt::format("expression is not assignable in {}", what));
      return false;
    }
    if (is_const(e.type)) {
      error(e.loc, fmt::format("cannot assign to a const-qualified object in {}", what));
      return false;
    }
    if (is_array(e.type) || is_function(e.type)) {
      error(e.loc, fmt::format("array or function is not assignable in {}", what));
      return false;
    }
    return true;
  }

  void fail_type(Expr& e, std::string msg) {
    error(e.loc, std::move(msg));
    e.type = types_.int_type();
    e.lvalue = false;
  }

  std::optional<std::int64_t> int_constant(ExprPtr& e) {
    check(e);
    rvalue(e);
    if (!is_integer(e->type)) return std::nullopt;
    auto v = eval_const(*e);
    if (!v || v->kind != ConstValue::Kind::Int) return std::nullopt;
    return v->i;
  }

  TypeRef resolve_type_name(const TypeName& tn) {
    bool unsized = false;
    return declarator_type(base_type(tn.spec), tn.decl, unsized);
  }

  void check(ExprPtr& ep) {
    Expr& e = *ep;
    switch (e.kind) {
      case ExprKind::IntLit:
        e.type = e.is_unsigned ? types_.unsigned_type() : types_.int_type();
        e.int_value = normalize(e.int_value, e.type);
        return;
      case ExprKind::FloatLit:
        e.type = types_.float_type(8);
        return;
      case ExprKind::StringLit:
        e.string_id = static_cast<int>(u_.strings.size());
        u_.strings.push_back(e.text);
        e.type = types_.array_of(types_.int_type(1), static_cast<std::uint32_t>(e.text.size()) + 1);
        e.lvalue = true;
        return;
      case ExprKind::Name:
        return name(e);
      case ExprKind::Unary:
        return unary(e);
      case ExprKind::Binary:
        return binary(e);
      case ExprKind::Logical: {
        TypeRef l = value(e.lhs), r = value(e.rhs);
        if (!is_scalar(l) || !is_scalar(r)) return fail_type(e, "operands of a logical operator must be scalars");
        e.type = types_.int_type();
        return;
      }
      case ExprKind::Assign:
        return assign(e);
      case ExprKind::Call:
        return call(e);
      case ExprKind::Index: {
        TypeRef l = value(e.lhs), r = value(e.rhs);
        if (!is_pointer(l) || !is_integer(r)) return fail_type(e, "subscripted value is not an array or pointer");
        if (!complete_pointee(l, e.loc)) return fail_type(e, "invalid subscript");
        convert(e.rhs, types_.int_type());
        e.type = l->base;
        e.lvalue = true;
        return;
      }
      case ExprKind::Member:
        return member(e);
      case ExprKind::IncDec: {
        check(e.lhs);
        if (!require_modifiable(*e.lhs, e.increment ? "increment" : "decrement")) return fail_type(e, "invalid operand");
        TypeRef t = unqual(e.lhs->type);
        if (!is_scalar(t)) return fail_type(e, "increment or decrement of a non-scalar");
        if (is_pointer(t) && !complete_pointee(t, e.loc)) return fail_type(e, "invalid operand");
        e.type = t;
        return;
      }
      case ExprKind::Cast: {
        TypeRef to = unqual(resolve_type_name(*e.type_name));
        TypeRef from = value(e.lhs);
        e.kind = ExprKind::Convert;
        e.type_name.reset();
        e.type = to;
        if (is_void(to)) return;
        if (!is_scalar(to) || !is_scalar(from)) {
          return fail_type(e, fmt::format("invalid cast from '{}' to '{}'", type_name(from), type_name(to)));
        }
        if ((is_floating(to) && is_pointer(from)) || (is_pointer(to) && is_floating(from))) {
          return fail_type(e, "invalid cast between pointer and floating type");
        }
        return;
      }
      case ExprKind::Sizeof: {
        TypeRef t = nullptr;
        if (e.type_name) {
          t = resolve_type_name(*e.type_name);
        } else {
          check(e.lhs);
          t = e.lhs->type;
          if (e.lhs->field && e.lhs->field->bitsize) error(e.loc, "sizeof applied to a bit-field");
        }
        if (is_void(t) || is_function(t) || t->size == 0) error(e.loc, "sizeof applied to an incomplete type");
        e.kind = ExprKind::IntLit;
        e.int_value = t->size;
        e.is_unsigned = true;
        e.type = types_.unsigned_type();
        e.lhs.reset();
        e.type_name.reset();
        return;
      }
      case ExprKind::InitList:
        return fail_type(e, "braced initializer is not allowed here");
      case ExprKind::Convert:
        return;
    }
  }

  void name(Expr& e) {
    Decl* d = lookup(e.text);
    if (!d) {
      if (is_builtin_name(e.text)) return fail_type(e, fmt::format("builtin '{}' must be called", e.text));
      return fail_type(e, fmt::format("use of undeclared identifier '{}'", e.text));
    }
    e.decl = d;
    switch (d->kind) {
      case DeclKind::Variable:
      case DeclKind::Parameter:
        e.type = d->type;
        e.lvalue = true;
        if (d->static_storage) used_.insert(d);
        return;
      case DeclKind::EnumConstant:
        e.type = types_.int_type();
        return;
      case DeclKind::Function:
        e.type = d->type;
        used_.insert(d);
        return;
      case DeclKind::Typedef:
        return fail_type(e, fmt::format("unexpected type name '{}'", e.text));
    }
  }

  void unary(Expr& e) {
    switch (e.unary) {
      case UnaryOp::Neg:
      case UnaryOp::Plus: {
        TypeRef t = value(e.lhs);
        if (!is_arithmetic(t)) return fail_type(e, "invalid argument type to unary expression");
        e.type = e.op_type = promote(t);
        convert(e.lhs, e.type);
        return;
      }
      case UnaryOp::BitNot: {
        TypeRef t = value(e.lhs);
        if (!is_integer(t)) return fail_type(e, "invalid argument type to unary expression");
        e.type = e.op_type = promote(t);
        convert(e.lhs, e.type);
        return;
      }
      case UnaryOp::Not: {
        TypeRef t = value(e.lhs);
        if (!is_scalar(t)) return fail_type(e, "invalid argument type to unary expression");
        e.type = types_.int_type();
        return;
      }
      case UnaryOp::Deref: {
        TypeRef t = value(e.lhs);
        if (!is_pointer(t)) return fail_type(e, "indirection requires a pointer operand");
        if (is_void(t->base)) return fail_type(e, "dereferencing a void pointer");
        e.type = t->base;
        e.lvalue = true;
        return;
      }
      case UnaryOp::AddrOf: {
        check(e.lhs);
        if (e.lhs->kind == ExprKind::Name && e.lhs->decl && e.lhs->decl->kind == DeclKind::Function) {
          return fail_type(e, "function pointers are not supported");
        }
        if (!e.lhs->lvalue) return fail_type(e, "cannot take the address of an rvalue");
        if (e.lhs->field && e.lhs->field->bitsize) return fail_type(e, "cannot take the address of a bit-field");
        e.type = types_.pointer_to(e.lhs->type);
        return;
      }
    }
  }

  void binary(Expr& e) {
    TypeRef l = value(e.lhs), r = value(e.rhs);
    TypeRef int_t = types_.int_type();
    auto arith = [&](bool integer_only) {
      bool ok = integer_only ? is_integer(l) && is_integer(r) : is_arithmetic(l) && is_arithmetic(r);
      if (!ok) {
        return fail_type(e, fmt::format("invalid operands to binary '{}' ('{}' and '{}')", spelling(e.binary),
                                        type_name(l), type_name(r)));
      }
      e.op_type = common(l, r);
      e.type = e.op_type;
      convert(e.lhs, e.op_type);
      convert(e.rhs, e.op_type);
    };
    switch (e.binary) {
      case BinaryOp::Add:
        if (is_pointer(l) && is_integer(r)) {
          if (!complete_pointee(l, e.loc)) return fail_type(e, "invalid pointer arithmetic");
          convert(e.rhs, int_t);
          e.type = e.op_type = l;
          return;
        }
        if (is_integer(l) && is_pointer(r)) {
          if (!complete_pointee(r, e.loc)) return fail_type(e, "invalid pointer arithmetic");
          convert(e.lhs, int_t);
          e.type = e.op_type = r;
          return;
        }
        return arith(false);
      case BinaryOp::Sub:
        if (is_pointer(l) && is_integer(r)) {
          if (!complete_pointee(l, e.loc)) return fail_type(e, "invalid pointer arithmetic");
          convert(e.rhs, int_t);
          e.type = e.op_type = l;
          return;
        }
        if (is_pointer(l) && is_pointer(r)) {
          if (unqual(l->base) != unqual(r->base)) return fail_type(e, "subtraction of incompatible pointers");
          if (!complete_pointee(l, e.loc)) return fail_type(e, "invalid pointer arithmetic");
          e.op_type = l;
          e.type = int_t;
          return;
        }
        return arith(false);
      case BinaryOp::Mul:
      case BinaryOp::Div:
        return arith(false);
      case BinaryOp::Mod:
      case BinaryOp::BitAnd:
      case BinaryOp::BitOr:
      case BinaryOp::BitXor:
        return arith(true);
      case BinaryOp::Shl:
      case BinaryOp::Shr:
        if (!is_integer(l) || !is_integer(r)) return fail_type(e, "invalid operands to shift");
        e.type = e.op_type = promote(l);
        convert(e.lhs, e.op_type);
        convert(e.rhs, int_t);
        return;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        e.type = int_t;
        if (is_arithmetic(l) && is_arithmetic(r)) {
          e.op_type = common(l, r);
          convert(e.lhs, e.op_type);
          convert(e.rhs, e.op_type);
          return;
        }
        if (is_pointer(l) && is_pointer(r)) {
          e.op_type = l;
          convert(e.rhs, l);
          return;
        }
        if (is_pointer(l) && is_null_constant(*e.rhs)) {
          e.op_type = l;
          convert(e.rhs, l);
          return;
        }
        if (is_pointer(r) && is_null_constant(*e.lhs)) {
          e.op_type = r;
          convert(e.lhs, r);
          return;
        }
        return fail_type(e, fmt::format("invalid operands to binary '{}' ('{}' and '{}')", spelling(e.binary),
                                        type_name(l), type_name(r)));
    }
  }

  void assign(Expr& e) {
    check(e.lhs);
    if (!require_modifiable(*e.lhs, "assignment")) {
      check(e.rhs);
      return fail_type(e, "invalid assignment");
    }
    TypeRef lt = unqual(e.lhs->type);
    e.type = lt;
    if (!e.compound) {
      check(e.rhs);
      assign_convert(e.rhs, lt, "assignment");
      return;
    }
    TypeRef rt = value(e.rhs);
    BinaryOp op = *e.compound;
    if ((op == BinaryOp::Add || op == BinaryOp::Sub) && is_pointer(lt) && is_integer(rt)) {
      if (!complete_pointee(lt, e.loc)) return fail_type(e, "invalid pointer arithmetic");
      e.op_type = lt;
      convert(e.rhs, types_.int_type());
      return;
    }
    bool integer_only = op == BinaryOp::Mod || op == BinaryOp::BitAnd || op == BinaryOp::BitOr ||
                        op == BinaryOp::BitXor || op == BinaryOp::Shl || op == BinaryOp::Shr;
    bool ok = integer_only ? is_integer(lt) && is_integer(rt) : is_arithmetic(lt) && is_arithmetic(rt);
    if (!ok) {
      return fail_type(e, fmt::format("invalid operands to '{}=' ('{}' and '{}')", spelling(op), type_name(lt),
                                      type_name(rt)));
    }
    if (op == BinaryOp::Shl || op == BinaryOp::Shr) {
      e.op_type = promote(lt);
      convert(e.rhs, types_.int_type());
    } else {
      e.op_type = common(lt, rt);
      convert(e.rhs, e.op_type);
    }
  }

  void call(Expr& e) {
    Expr& callee = *e.lhs;
    if (callee.kind != ExprKind::Name) {
      for (auto& a : e.args) check(a);
      return fail_type(e, "called object is not a function name");
    }
    Decl* d = lookup(callee.text);
    Builtin b = Builtin::None;
    if ((!d || d->kind == DeclKind::Function) && is_builtin_name(callee.text, &b)) {
      e.builtin = b;
      std::size_t want = b == Builtin::Getchar ? 0 : 1;
      if (e.args.size() != want) {
        for (auto& a : e.args) check(a);
        return fail_type(e, fmt::format("'{}' takes {} argument{}", callee.text, want, want == 1 ? "" : "s"));
      }
      for (auto& a : e.args) {
        check(a);
        assign_convert(a, types_.int_type(), "argument");
      }
      e.type = b == Builtin::PrintInt ? types_.void_type() : types_.int_type();
      callee.type = types_.function(e.type, std::vector<TypeRef>(want, types_.int_type()));
      return;
    }
    if (!d) {
      for (auto& a : e.args) check(a);
      return fail_type(e, fmt::format("call to undeclared function '{}'", callee.text));
    }
    if (d->kind != DeclKind::Function) {
      for (auto& a : e.args) check(a);
      return fail_type(e, fmt::format("called object '{}' is not a function", callee.text));
    }
    callee.decl = d;
    callee.type = d->type;
    used_.insert(d);
    const auto& params = unqual(d->type)->params;
    if (params.size() != e.args.size()) {
      for (auto& a : e.args) check(a);
      return fail_type(e, fmt::format("'{}' expects {} argument{}, got {}", callee.text, params.size(),
                                      params.size() == 1 ? "" : "s", e.args.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      check(e.args[i]);
      assign_convert(e.args[i], params[i], "argument");
    }
    e.type = unqual(d->type)->base;
  }

  void member(Expr& e) {
    TypeRef container = nullptr;
    if (e.arrow) {
      TypeRef l = value(e.lhs);
      if (!is_pointer(l) || !is_aggregate(l->base)) return fail_type(e, "member reference requires a struct pointer");
      container = l->base;
    } else {
      check(e.lhs);
      if (!is_aggregate(e.lhs->type)) return fail_type(e, "member reference base is not a struct or union");
      container = e.lhs->type;
    }
    const Record* rec = unqual(container)->record;
    if (!rec->complete) return fail_type(e, fmt::format("incomplete type '{}'", type_name(unqual(container))));
    const FieldInfo* f = rec->field(e.text);
    if (!f) return fail_type(e, fmt::format("no member named '{}' in '{}'", e.text, type_name(unqual(container))));
    bool c = is_const(container), v = false;
    for (TypeRef t = container; t && (t->kind == TypeKind::Const || t->kind == TypeKind::Volatile); t = t->base) {
      if (t->kind == TypeKind::Volatile) v = true;
    }
    e.field = f;
    e.type = types_.qualified(f->type, c, v);
    e.lvalue = e.arrow || e.lhs->lvalue;
  }

  void finish() {
    std::vector<Decl*>& s = u_.file_symbols;
    s.insert(s.end(), file_types_.begin(), file_types_.end());
    s.insert(s.end(), file_functions_.begin(), file_functions_.end());
    s.insert(s.end(), file_vars_.begin(), file_vars_.end());
    for (std::size_t i = 0; i < s.size(); ++i) s[i]->uplink = i == 0 ? nullptr : s[i - 1];

    for (Decl& d : u_.decls) {
      if (!used_.count(&d) || d.defined || !d.file_scope) continue;
      if (d.kind != DeclKind::Function && d.kind != DeclKind::Variable) continue;
      if (d.linkage == Linkage::Internal) {
        error(d.loc, fmt::format("'{}' has internal linkage but is never defined", d.name));
        continue;
      }
      u_.externals.push_back(&d);
    }
  }

  TypedUnit& u_;
  Diagnostics& diags_;
  TypeTable& types_;
  std::vector<Scope> scopes_;
  FunctionInfo* fn_ = nullptr;
  std::uint32_t frame_offset_ = kFrameHeader;
  int static_counter_ = 0;
  std::vector<Decl*> file_types_;
  std::vector<Decl*> file_functions_;
  std::vector<Decl*> file_vars_;
  std::set<const Decl*> used_;
  std::map<const RecordSpec*, TypeRef> resolved_records_;
  std::map<const EnumSpec*, TypeRef> resolved_enums_;
};

std::optional<ConstValue> eval_address(const Expr& e);

std::optional<ConstValue> eval_int_binary(BinaryOp op, TypeRef t, std::int64_t a, std::int64_t b) {
  bool u = unqual(t)->kind == TypeKind::Unsigned || unqual(t)->kind == TypeKind::Pointer;
  auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  std::int64_t r = 0;
  switch (op) {
    case BinaryOp::Add: r = static_cast<std::int64_t>(ua + ub); break;
    case BinaryOp::Sub: r = static_cast<std::int64_t>(ua - ub); break;
    case BinaryOp::Mul: r = static_cast<std::int64_t>(ua * ub); break;
    case BinaryOp::Div:
      if (b == 0) return std::nullopt;
      r = u ? static_cast<std::int64_t>(ua / ub) : a / b;
      break;
    case BinaryOp::Mod:
      if (b == 0) return std::nullopt;
      r = u ? static_cast<std::int64_t>(ua % ub) : a % b;
      break;
    case BinaryOp::Shl: r = static_cast<std::int64_t>(ua << (b & 31)); break;
    case BinaryOp::Shr: r = u ? static_cast<std::int64_t>(ua >> (b & 31)) : a >> (b & 31); break;
    case BinaryOp::BitAnd: r = a & b; break;
    case BinaryOp::BitOr: r = a | b; break;
    case BinaryOp::BitXor: r = a ^ b; break;
    case BinaryOp::Lt: return ConstValue{ConstValue::Kind::Int, a < b};
    case BinaryOp::Le: return ConstValue{ConstValue::Kind::Int, a <= b};
    case BinaryOp::Gt: return ConstValue{ConstValue::Kind::Int, a > b};
    case BinaryOp::Ge: return ConstValue{ConstValue::Kind::Int, a >= b};
    case BinaryOp::Eq: return ConstValue{ConstValue::Kind::Int, a == b};
    case BinaryOp::Ne: return ConstValue{ConstValue::Kind::Int, a != b};
  }
  return ConstValue{ConstValue::Kind::Int, normalize(r, t)};
}

std::optional<ConstValue> eval_float_binary(BinaryOp op, TypeRef t, double a, double b) {
  double r = 0;
  switch (op) {
    case BinaryOp::Add: r = a + b; break;
    case BinaryOp::Sub: r = a - b; break;
    case BinaryOp::Mul: r = a * b; break;
    case BinaryOp::Div: r = a / b; break;
    case BinaryOp::Lt: return ConstValue{ConstValue::Kind::Int, a < b};
    case BinaryOp::Le: return ConstValue{ConstValue::Kind::Int, a <= b};
    case BinaryOp::Gt: return ConstValue{ConstValue::Kind::Int, a > b};
    case BinaryOp::Ge: return ConstValue{ConstValue::Kind::Int, a >= b};
    case BinaryOp::Eq: return ConstValue{ConstValue::Kind::Int, a == b};
    case BinaryOp::Ne: return ConstValue{ConstValue::Kind::Int, a != b};
    default: return std::nullopt;
  }
  ConstValue v{ConstValue::Kind::Float};
  v.f = unqual(t)->size == 4 ? static_cast<float>(r) : r;
  return v;
}

bool truth(const ConstValue& v) {
  switch (v.kind) {
    case ConstValue::Kind::Int: return v.i != 0;
    case ConstValue::Kind::Float: return v.f != 0;
    case ConstValue::Kind::Address: return true;
  }
  return false;
}

std::optional<ConstValue> convert_const(ConstValue v, TypeRef to) {
  to = unqual(to);
  if (to->kind == TypeKind::Float) {
    if (v.kind == ConstValue::Kind::Address) return std::nullopt;
    double f = v.kind == ConstValue::Kind::Int ? static_cast<double>(v.i) : v.f;
    ConstValue r{ConstValue::Kind::Float};
    r.f = to->size == 4 ? static_cast<float>(f) : f;
    return r;
  }
  if (to->kind == TypeKind::Int || to->kind == TypeKind::Unsigned || to->kind == TypeKind::Enum ||
      to->kind == TypeKind::Pointer) {
    if (v.kind == ConstValue::Kind::Address) return v;
    std::int64_t i = v.kind == ConstValue::Kind::Int ? v.i : static_cast<std::int64_t>(v.f);
    return ConstValue{ConstValue::Kind::Int, normalize(i, to)};
  }
  return std::nullopt;
}

std::optional<ConstValue> eval_address(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Name:
      if (e.decl && (e.decl->static_storage || e.decl->kind == DeclKind::Function)) {
        ConstValue v{ConstValue::Kind::Address};
        v.symbol = e.decl;
        return v;
      }
      return std::nullopt;
    case ExprKind::StringLit: {
      ConstValue v{ConstValue::Kind::Address};
      v.string_id = e.string_id;
      return v;
    }
    case ExprKind::Index: {
      auto base = eval_const(*e.lhs);
      auto idx = eval_const(*e.rhs);
      if (!base || !idx || base->kind != ConstValue::Kind::Address || idx->kind != ConstValue::Kind::Int) {
        return std::nullopt;
      }
      base->addend += idx->i * static_cast<std::int64_t>(unqual(e.type)->size);
      return base;
    }
    case ExprKind::Member: {
      auto base = e.arrow ? eval_const(*e.lhs) : eval_address(*e.lhs);
      if (!base || base->kind != ConstValue::Kind::Address || !e.field || e.field->bitsize) return std::nullopt;
      base->addend += e.field->offset;
      return base;
    }
    case ExprKind::Unary:
      if (e.unary == UnaryOp::Deref) {
        auto p = eval_const(*e.lhs);
        if (p && p->kind == ConstValue::Kind::Address) return p;
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<ConstValue> eval_const(const Expr& e) {
  using K = ConstValue::Kind;
  switch (e.kind) {
    case ExprKind::IntLit:
      return ConstValue{K::Int, e.int_value};
    case ExprKind::FloatLit: {
      ConstValue v{K::Float};
      v.f = e.float_value;
      return v;
    }
    case ExprKind::Name:
      if (e.decl && e.decl->kind == DeclKind::EnumConstant) return ConstValue{K::Int, e.decl->enum_value};
      return std::nullopt;
    case ExprKind::Convert: {
      if (!e.lhs) return std::nullopt;
      if (e.lhs->type && is_array(e.lhs->type)) return eval_address(*e.lhs);
      if (is_void(e.type)) return std::nullopt;
      auto v = eval_const(*e.lhs);
      if (!v) return std::nullopt;
      return convert_const(*v, e.type);
    }
    case ExprKind::Unary: {
      if (e.unary == UnaryOp::AddrOf) return eval_address(*e.lhs);
      if (e.unary == UnaryOp::Deref) return std::nullopt;
      auto v = eval_const(*e.lhs);
      if (!v || v->kind == K::Address) return std::nullopt;
      switch (e.unary) {
        case UnaryOp::Plus:
          return v;
        case UnaryOp::Neg:
          if (v->kind == K::Float) {
            v->f = -v->f;
            return v;
          }
          return ConstValue{K::Int, normalize(static_cast<std::int64_t>(0ull - static_cast<std::uint64_t>(v->i)), e.type)};
        case UnaryOp::BitNot:
          return ConstValue{K::Int, normalize(~v->i, e.type)};
        case UnaryOp::Not:
          return ConstValue{K::Int, truth(*v) ? 0 : 1};
        default:
          return std::nullopt;
      }
    }
    case ExprKind::Binary: {
      auto a = eval_const(*e.lhs);
      auto b = eval_const(*e.rhs);
      if (!a || !b || !e.op_type) return std::nullopt;
      if (a->kind == K::Address || b->kind == K::Address) {
        TypeRef pt = unqual(e.op_type);
        if (pt->kind != TypeKind::Pointer) return std::nullopt;
        auto scale = static_cast<std::int64_t>(unqual(pt->base)->size);
        if (e.binary == BinaryOp::Add && a->kind == K::Address && b->kind == K::Int) {
          a->addend += b->i * scale;
          return a;
        }
        if (e.binary == BinaryOp::Add && b->kind == K::Address && a->kind == K::Int) {
          b->addend += a->i * scale;
          return b;
        }
        if (e.binary == BinaryOp::Sub && a->kind == K::Address && b->kind == K::Int) {
          a->addend -= b->i * scale;
          return a;
        }
        return std::nullopt;
      }
      if (a->kind == K::Float || b->kind == K::Float) return eval_float_binary(e.binary, e.op_type, a->f, b->f);
      if (unqual(e.op_type)->kind == TypeKind::Pointer) {
        if (e.binary == BinaryOp::Add || e.binary == BinaryOp::Sub) return std::nullopt;
      }
      return eval_int_binary(e.binary, e.op_type, a->i, b->i);
    }
    case ExprKind::Logical: {
      auto a = eval_const(*e.lhs);
      if (!a) return std::nullopt;
      bool ta = truth(*a);
      if (e.logical == LogicalOp::And && !ta) return ConstValue{K::Int, 0};
      if (e.logical == LogicalOp::Or && ta) return ConstValue{K::Int, 1};
      auto b = eval_const(*e.rhs);
      if (!b) return std::nullopt;
      return ConstValue{K::Int, truth(*b) ? 1 : 0};
    }
    default:
      return std::nullopt;
  }
}

TypedUnit typecheck(TranslationUnit tu, Diagnostics& diags) {
  TypedUnit u;
  u.file = tu.file;
  u.ast = std::move(tu);
  Checker(u, diags).run();
  return u;
}

}  // namespace cdb::minic
