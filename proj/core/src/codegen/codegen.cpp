#include "cdb/codegen/codegen.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include <fmt/format.h>

#include "cdb/minic/parser.hpp"
#include "cdb/sym/pickle.hpp"

namespace cdb::codegen {

using minic::Decl;
using minic::DeclKind;
using minic::Expr;
using minic::ExprKind;
using minic::Stmt;
using minic::StmtKind;
using minic::TypeKind;
using minic::TypeRef;
using minic::unqual;

namespace {

Mem mem_of(TypeRef t) {
  t = unqual(t);
  switch (t->kind) {
    case TypeKind::Int:
      return t->size == 1 ? Mem::I8 : t->size == 2 ? Mem::I16 : Mem::I32;
    case TypeKind::Unsigned:
      return t->size == 1 ? Mem::U8 : t->size == 2 ? Mem::U16 : Mem::U32;
    case TypeKind::Enum:
      return Mem::I32;
    case TypeKind::Pointer:
      return Mem::U32;
    case TypeKind::Float:
      return t->size == 4 ? Mem::F32 : Mem::F64;
    default:
      throw std::logic_error("no scalar representation for type " + minic::type_name(t));
  }
}

Arith arith_of(TypeRef t) {
  switch (mem_of(t)) {
    case Mem::U32: return Arith::U32;
    case Mem::F32: return Arith::F32;
    case Mem::F64: return Arith::F64;
    default: return Arith::I32;
  }
}

Op binary_op(minic::BinaryOp op) {
  using B = minic::BinaryOp;
  switch (op) {
    case B::Add: return Op::Add;
    case B::Sub: return Op::Sub;
    case B::Mul: return Op::Mul;
    case B::Div: return Op::Div;
    case B::Mod: return Op::Mod;
    case B::Shl: return Op::Shl;
    case B::Shr: return Op::Shr;
    case B::BitAnd: return Op::And;
    case B::BitOr: return Op::Or;
    case B::BitXor: return Op::Xor;
    case B::Lt: return Op::Lt;
    case B::Le: return Op::Le;
    case B::Gt: return Op::Gt;
    case B::Ge: return Op::Ge;
    case B::Eq: return Op::Eq;
    case B::Ne: return Op::Ne;
  }
  return Op::Nop;
}

bool is_bitfield(const Expr& e) { return e.kind == ExprKind::Member && e.field && e.field->bitsize; }

std::int64_t bitfield_operand(const minic::FieldInfo& f) {
  bool is_signed = unqual(f.type)->kind == TypeKind::Int;
  return static_cast<std::int64_t>(f.lsb) | (is_signed ? 0x100 : 0);
}

class UnitGen {
 public:
  UnitGen(const minic::TypedUnit& unit, const minic::StopPlan& plan, const CodegenOptions& opt)
      : unit_(unit), plan_(plan), opt_(opt) {}

  ObjectModule run() {
    SymfileResult sf = emit_symfile(unit_, plan_, opt_.uname);
    uids_ = std::move(sf.uids);
    om_.source_file = unit_.file;
    om_.uname = opt_.uname;
    om_.instrumented = opt_.instrument;
    om_.spoint_count = static_cast<std::uint32_t>(plan_.size());
    om_.symfile_name = sym::symfile_name(opt_.uname);
    om_.symfile = sym::pickle(sf.module);

    declare_symbols();
    layout_data();
    for (const minic::FunctionInfo* f : unit_.functions) gen_function(*f);
    for (const Decl* d : address_plan(unit_)) om_.address_plan.push_back(decl_syms_.at(d));
    return std::move(om_);
  }

 private:
  // Symbols.
  std::uint32_t add_symbol(ObjSymbol s) {
    om_.symbols.push_back(std::move(s));
    return static_cast<std::uint32_t>(om_.symbols.size() - 1);
  }

  static Binding binding_of(const Decl& d) {
    return d.linkage == minic::Linkage::External ? Binding::Global : Binding::Local;
  }

  void declare_symbols() {
    for (std::size_t i = 0; i < unit_.functions.size(); ++i) {
      const Decl* d = unit_.functions[i]->decl;
      decl_syms_[d] = add_symbol({d->link_name, SymKind::Function, binding_of(*d), static_cast<std::uint32_t>(i), 0});
    }
    for (const Decl* d : unit_.externals) {
      SymKind k = d->kind == DeclKind::Function ? SymKind::Function : SymKind::Data;
      decl_syms_[d] = add_symbol({d->link_name, k, Binding::Undefined, 0, 0});
    }
  }

  std::uint32_t tos_symbol() {
    if (!tos_sym_) tos_sym_ = add_symbol({kNubTos, SymKind::Data, Binding::Undefined, 0, 0});
    return *tos_sym_;
  }

  // Static data.
  std::uint32_t reserve(std::uint32_t size, std::uint32_t align) {
    std::uint32_t a = std::max<std::uint32_t>(align, 1);
    std::uint32_t off = static_cast<std::uint32_t>((om_.data.size() + a - 1) / a * a);
    om_.data.resize(off + size);
    return off;
  }

  void put_le(std::uint32_t off, std::uint64_t v, std::uint32_t n) {
    for (std::uint32_t i = 0; i < n; ++i) om_.data[off + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
  }

  void layout_data() {
    std::vector<const Decl*> vars;
    for (const Decl* d : unit_.file_symbols) {
      if (d->kind == DeclKind::Variable) vars.push_back(d);
    }
    vars.insert(vars.end(), unit_.local_statics.begin(), unit_.local_statics.end());
    for (const Decl* d : vars) {
      std::uint32_t off = reserve(d->type->size, d->type->align);
      decl_syms_[d] = add_symbol({d->link_name, SymKind::Data, binding_of(*d), off, d->type->size});
      pending_inits_.push_back({d, off});
    }
    for (std::size_t i = 0; i < unit_.strings.size(); ++i) {
      const std::string& s = unit_.strings[i];
      std::uint32_t off = reserve(static_cast<std::uint32_t>(s.size() + 1), 1);
      std::memcpy(om_.data.data() + off, s.data(), s.size());
      string_syms_.push_back(
          add_symbol({fmt::format(".str.{}", i), SymKind::Data, Binding::Local, off, static_cast<std::uint32_t>(s.size() + 1)}));
    }
    for (const auto& [d, off] : pending_inits_) {
      if (d->init) init_data(off, d->type, *d->init);
    }
  }

  void init_data(std::uint32_t off, TypeRef t, const Expr& init) {
    TypeRef ut = unqual(t);
    if (ut->kind == TypeKind::Array) {
      TypeRef elem = ut->base;
      if (init.kind == ExprKind::StringLit) {
        std::size_t n = std::min<std::size_t>(init.text.size(), ut->nelems);
        std::memcpy(om_.data.data() + off, init.text.data(), n);
        return;
      }
      for (std::size_t i = 0; i < init.args.size() && i < ut->nelems; ++i) {
        init_data(off + static_cast<std::uint32_t>(i) * elem->size, elem, *init.args[i]);
      }
      return;
    }
    if (ut->kind == TypeKind::Struct || ut->kind == TypeKind::Union) {
      const auto& fields = ut->record->fields;
      for (std::size_t i = 0; i < init.args.size() && i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (f.bitsize) {
          auto v = minic::eval_const(*init.args[i]);
          if (!v || v->kind != minic::ConstValue::Kind::Int) throw std::logic_error("non-constant bit-field initializer");
          std::uint32_t unit = 0;
          for (int b = 0; b < 4; ++b) unit |= std::to_integer<std::uint32_t>(om_.data[off + f.offset + b]) << (8 * b);
          std::uint32_t mask = f.bitsize == 32 ? 0xffffffffu : ((1u << f.bitsize) - 1);
          unit = (unit & ~(mask << f.lsb)) | ((static_cast<std::uint32_t>(v->i) & mask) << f.lsb);
          put_le(off + f.offset, unit, 4);
        } else {
          init_data(off + f.offset, f.type, *init.args[i]);
        }
      }
      return;
    }
    auto v = minic::eval_const(init);
    if (!v) throw std::logic_error("non-constant static initializer");
    Mem m = mem_of(ut);
    switch (v->kind) {
      case minic::ConstValue::Kind::Int:
        put_le(off, static_cast<std::uint64_t>(v->i), mem_size(m));
        break;
      case minic::ConstValue::Kind::Float:
        if (m == Mem::F32) put_le(off, std::bit_cast<std::uint32_t>(static_cast<float>(v->f)), 4);
        else put_le(off, std::bit_cast<std::uint64_t>(v->f), 8);
        break;
      case minic::ConstValue::Kind::Address: {
        std::uint32_t sym = v->symbol ? decl_syms_.at(v->symbol) : string_syms_.at(v->string_id);
        om_.relocs.push_back({off, sym, static_cast<std::int32_t>(v->addend)});
        break;
      }
    }
  }

  // Code.
  void emit(Op op, std::int32_t a = 0, std::int64_t b = 0) { code_->push_back({op, a, b}); }

  int new_label() {
    labels_.push_back(-1);
    return static_cast<int>(labels_.size() - 1);
  }
  void bind(int label) { labels_[label] = static_cast<int>(code_->size()); }
  void jump(Op op, int label, std::int64_t b = 0) {
    fixups_.emplace_back(code_->size(), label);
    emit(op, 0, b);
  }

  void store_word(std::uint32_t frame_offset, std::int64_t value, Mem m) {
    emit(Op::AddrLocal, static_cast<std::int32_t>(frame_offset));
    emit(Op::PushI, 0, value);
    emit(Op::Store, static_cast<std::int32_t>(m));
    emit(Op::Pop);
  }

  // ( _Nub_bpflags[n] != 0 && _Nub_bp(n), ... ) with ip recorded first.
  void spoint(int n) {
    if (n < 0 || !opt_.instrument) return;
    store_word(kFrameIp, n, Mem::I32);
    emit(Op::BpCheck, n);
  }

  void set_ip_for_call() {
    if (!opt_.instrument || points_.empty()) return;
    store_word(kFrameIp, points_.back(), Mem::I32);
  }

  void prologue(const minic::FunctionInfo& f) {
    // tos.down = _Nub_tos; tos.func = uid; tos.module = uname; _Nub_tos = &tos;
    emit(Op::AddrLocal, kFrameDown);
    emit(Op::AddrGlobal, static_cast<std::int32_t>(tos_symbol()));
    emit(Op::Load, static_cast<std::int32_t>(Mem::U32));
    emit(Op::Store, static_cast<std::int32_t>(Mem::U32));
    emit(Op::Pop);
    store_word(kFrameFunc, uids_.at(f.decl), Mem::I32);
    store_word(kFrameModule, opt_.uname, Mem::U32);
    emit(Op::AddrGlobal, static_cast<std::int32_t>(tos_symbol()));
    emit(Op::AddrLocal, 0);
    emit(Op::Store, static_cast<std::int32_t>(Mem::U32));
    emit(Op::Pop);
  }

  void epilogue() {
    if (!opt_.instrument) return;
    // _Nub_tos = tos.down;
    emit(Op::AddrGlobal, static_cast<std::int32_t>(tos_symbol()));
    emit(Op::AddrLocal, kFrameDown);
    emit(Op::Load, static_cast<std::int32_t>(Mem::U32));
    emit(Op::Store, static_cast<std::int32_t>(Mem::U32));
    emit(Op::Pop);
  }

  void gen_function(const minic::FunctionInfo& f) {
    ObjFunction fn;
    fn.symbol = decl_syms_.at(f.decl);
    fn.frame_size = f.frame_size;
    TypeRef result = unqual(f.decl->type)->base;
    fn.returns_value = !minic::is_void(result);
    for (const Decl* p : f.params) fn.params.push_back({p->frame_offset, mem_of(p->type)});
    code_ = &fn.code;
    labels_.clear();
    fixups_.clear();
    result_ = result;

    if (opt_.instrument) prologue(f);
    spoint(f.entry_stop);
    if (f.entry_stop >= 0) points_.push_back(f.entry_stop);
    for (const auto& s : f.def->body->body) stmt(*s);
    if (f.entry_stop >= 0) points_.pop_back();
    epilogue();
    if (fn.returns_value) push_zero(result);
    emit(Op::Ret, fn.returns_value ? 1 : 0);

    for (auto [at, label] : fixups_) {
      if (labels_[label] < 0) throw std::logic_error("unbound label");
      fn.code[at].a = labels_[label];
    }
    code_ = nullptr;
    om_.functions.push_back(std::move(fn));
  }

  void push_zero(TypeRef t) {
    if (minic::is_floating(t)) emit(Op::PushF, 0, std::bit_cast<std::int64_t>(0.0));
    else emit(Op::PushI, 0, 0);
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Expr:
        effect(*s.expr);
        break;
      case StmtKind::Empty:
        spoint(s.stop);
        break;
      case StmtKind::Block:
        for (const auto& b : s.body) stmt(*b);
        break;
      case StmtKind::If: {
        int l_else = new_label(), l_end = new_label();
        branch_false(*s.expr, l_else);
        stmt(*s.then_body);
        if (s.else_body) {
          jump(Op::Jmp, l_end);
          bind(l_else);
          stmt(*s.else_body);
        } else {
          bind(l_else);
        }
        bind(l_end);
        break;
      }
      case StmtKind::While: {
        int l_top = new_label(), l_end = new_label();
        bind(l_top);
        branch_false(*s.expr, l_end);
        stmt(*s.then_body);
        jump(Op::Jmp, l_top);
        bind(l_end);
        break;
      }
      case StmtKind::For: {
        int l_top = new_label(), l_end = new_label();
        if (s.init) effect(*s.init);
        bind(l_top);
        if (s.expr) branch_false(*s.expr, l_end);
        stmt(*s.then_body);
        if (s.step) effect(*s.step);
        jump(Op::Jmp, l_top);
        bind(l_end);
        break;
      }
      case StmtKind::Return:
        if (s.expr) {
          value(*s.expr);
        } else {
          spoint(s.stop);
        }
        epilogue();
        if (!s.expr && !minic::is_void(result_)) push_zero(result_);
        emit(Op::Ret, minic::is_void(result_) ? 0 : 1);
        break;
      case StmtKind::Decl:
        for (const auto& id : s.decl->declarators) {
          if (!id.init || !id.symbol || id.symbol->static_storage) continue;
          if (id.symbol->kind != DeclKind::Variable) continue;
          local_init_top(*id.symbol, *id.init);
        }
        break;
    }
  }

  void branch_false(const Expr& cond, int label) {
    value(cond);
    jump(Op::Jz, label, static_cast<std::int64_t>(arith_of(cond.type)));
  }

  void local_init_top(const Decl& d, const Expr& init) {
    bool scalar_path = init.kind != ExprKind::InitList && init.kind != ExprKind::StringLit;
    if (!scalar_path || minic::is_aggregate(d.type)) {
      // The stopping point belongs to the initializer as a whole.
      spoint(init.stop);
      if (init.stop >= 0) points_.push_back(init.stop);
      local_init(d.frame_offset, d.type, init, init.stop);
      if (init.stop >= 0) points_.pop_back();
    } else {
      local_init(d.frame_offset, d.type, init, -1);
    }
  }

  // Emits a value() for e, but without its own stopping point when that
  // point has already been emitted by the caller.
  void value_without(const Expr& e, int emitted_stop) {
    if (e.stop >= 0 && e.stop == emitted_stop) {
      int saved = e.stop;
      const_cast<Expr&>(e).stop = -1;
      points_.push_back(saved);
      value(e);
      points_.pop_back();
      const_cast<Expr&>(e).stop = saved;
    } else {
      value(e);
    }
  }

  void local_init(std::uint32_t off, TypeRef t, const Expr& init, int emitted_stop) {
    TypeRef ut = unqual(t);
    if (ut->kind == TypeKind::Array) {
      TypeRef elem = ut->base;
      if (init.kind == ExprKind::StringLit) {
        Mem m = mem_of(elem);
        for (std::uint32_t i = 0; i < ut->nelems; ++i) {
          auto ch = i < init.text.size() ? static_cast<std::int64_t>(static_cast<signed char>(init.text[i])) : 0;
          if (m == Mem::U8) ch &= 0xff;
          store_word(off + i, ch, m);
        }
        return;
      }
      emit(Op::AddrLocal, static_cast<std::int32_t>(off));
      emit(Op::Zero, static_cast<std::int32_t>(ut->size));
      for (std::size_t i = 0; i < init.args.size() && i < ut->nelems; ++i) {
        local_init(off + static_cast<std::uint32_t>(i) * elem->size, elem, *init.args[i], emitted_stop);
      }
      return;
    }
    if (ut->kind == TypeKind::Struct || ut->kind == TypeKind::Union) {
      if (init.kind == ExprKind::InitList) {
        emit(Op::AddrLocal, static_cast<std::int32_t>(off));
        emit(Op::Zero, static_cast<std::int32_t>(ut->size));
        const auto& fields = ut->record->fields;
        for (std::size_t i = 0; i < init.args.size() && i < fields.size(); ++i) {
          const auto& f = fields[i];
          if (f.bitsize) {
            emit(Op::AddrLocal, static_cast<std::int32_t>(off + f.offset));
            value_without(*init.args[i], emitted_stop);
            emit(Op::BfStore, static_cast<std::int32_t>(f.bitsize), bitfield_operand(f));
            emit(Op::Pop);
          } else {
            local_init(off + f.offset, f.type, *init.args[i], emitted_stop);
          }
        }
        return;
      }
      emit(Op::AddrLocal, static_cast<std::int32_t>(off));
      value_without(init, emitted_stop);
      emit(Op::Copy, static_cast<std::int32_t>(ut->size));
      emit(Op::Pop);
      return;
    }
    emit(Op::AddrLocal, static_cast<std::int32_t>(off));
    value_without(init, emitted_stop);
    emit(Op::Store, static_cast<std::int32_t>(mem_of(ut)));
    emit(Op::Pop);
  }

  void effect(const Expr& e) {
    value(e);
    if (!minic::is_void(e.type)) emit(Op::Pop);
  }

  void convert(TypeRef from, TypeRef to) {
    Mem a = mem_of(from), b = mem_of(to);
    if (a != b) emit(Op::Cvt, static_cast<std::int32_t>(a), static_cast<std::int64_t>(b));
  }

  void scale(std::uint32_t n) {
    if (n == 1) return;
    emit(Op::PushI, 0, n);
    emit(Op::Mul, static_cast<std::int32_t>(Arith::I32));
  }

  void load(TypeRef t, const minic::FieldInfo* f) {
    if (f && f->bitsize) {
      emit(Op::BfLoad, static_cast<std::int32_t>(f->bitsize), bitfield_operand(*f));
      return;
    }
    TypeRef ut = unqual(t);
    if (ut->kind == TypeKind::Array || ut->kind == TypeKind::Struct || ut->kind == TypeKind::Union) return;
    emit(Op::Load, static_cast<std::int32_t>(mem_of(ut)));
  }

  void store(TypeRef t, const minic::FieldInfo* f) {
    if (f && f->bitsize) {
      emit(Op::BfStore, static_cast<std::int32_t>(f->bitsize), bitfield_operand(*f));
      return;
    }
    emit(Op::Store, static_cast<std::int32_t>(mem_of(t)));
  }

  void addr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name: {
        const Decl* d = e.decl;
        if (d->static_storage) emit(Op::AddrGlobal, static_cast<std::int32_t>(decl_syms_.at(d)), 0);
        else emit(Op::AddrLocal, static_cast<std::int32_t>(d->frame_offset));
        return;
      }
      case ExprKind::StringLit:
        emit(Op::AddrGlobal, static_cast<std::int32_t>(string_syms_.at(e.string_id)), 0);
        return;
      case ExprKind::Unary:
        if (e.unary == minic::UnaryOp::Deref) {
          value(*e.lhs);
          return;
        }
        break;
      case ExprKind::Index:
        value(*e.lhs);
        value(*e.rhs);
        scale(unqual(e.type)->size);
        emit(Op::Add, static_cast<std::int32_t>(Arith::U32));
        return;
      case ExprKind::Member:
        if (e.arrow) value(*e.lhs);
        else addr(*e.lhs);
        if (e.field->offset) {
          emit(Op::PushI, 0, e.field->offset);
          emit(Op::Add, static_cast<std::int32_t>(Arith::U32));
        }
        return;
      default:
        break;
    }
    throw std::logic_error(fmt::format("{}:{}.{}: expression has no address", unit_.file, e.loc.line, e.loc.col));
  }

  struct PointScope {
    PointScope(UnitGen& g, int n) : g(g), active(n >= 0) {
      if (active) g.points_.push_back(n);
    }
    ~PointScope() {
      if (active) g.points_.pop_back();
    }
    UnitGen& g;
    bool active;
  };

  void value(const Expr& e) {
    spoint(e.stop);
    PointScope scope(*this, e.stop);
    switch (e.kind) {
      case ExprKind::IntLit:
        emit(Op::PushI, 0, e.int_value);
        return;
      case ExprKind::FloatLit:
        emit(Op::PushF, 0, std::bit_cast<std::int64_t>(e.float_value));
        return;
      case ExprKind::StringLit:
        addr(e);
        return;
      case ExprKind::Name:
        if (e.decl->kind == DeclKind::EnumConstant) {
          emit(Op::PushI, 0, e.decl->enum_value);
          return;
        }
        addr(e);
        load(e.type, nullptr);
        return;
      case ExprKind::Index:
        addr(e);
        load(e.type, nullptr);
        return;
      case ExprKind::Member:
        addr(e);
        load(e.type, e.field);
        return;
      case ExprKind::Unary:
        return unary(e);
      case ExprKind::Binary:
        return binary(e);
      case ExprKind::Logical:
        return logical(e);
      case ExprKind::Assign:
        return assign(e);
      case ExprKind::IncDec:
        return incdec(e);
      case ExprKind::Call:
        return call(e);
      case ExprKind::Convert: {
        TypeRef from = e.lhs->type;
        if (minic::is_array(from)) {
          addr(*e.lhs);
          return;
        }
        if (minic::is_void(e.type)) {
          effect(*e.lhs);
          return;
        }
        value(*e.lhs);
        convert(from, e.type);
        return;
      }
      case ExprKind::Cast:
      case ExprKind::Sizeof:
      case ExprKind::InitList:
        break;
    }
    throw std::logic_error(fmt::format("{}:{}.{}: unexpected expression in code generation", unit_.file, e.loc.line,
                                       e.loc.col));
  }

  void unary(const Expr& e) {
    switch (e.unary) {
      case minic::UnaryOp::Neg:
        value(*e.lhs);
        emit(Op::Neg, static_cast<std::int32_t>(arith_of(e.op_type)));
        return;
      case minic::UnaryOp::Plus:
        value(*e.lhs);
        return;
      case minic::UnaryOp::BitNot:
        value(*e.lhs);
        emit(Op::BitNot, static_cast<std::int32_t>(arith_of(e.op_type)));
        return;
      case minic::UnaryOp::Not:
        value(*e.lhs);
        emit(Op::LNot, static_cast<std::int32_t>(arith_of(e.lhs->type)));
        return;
      case minic::UnaryOp::Deref:
        addr(e);
        load(e.type, nullptr);
        return;
      case minic::UnaryOp::AddrOf:
        addr(*e.lhs);
        return;
    }
  }

  void binary(const Expr& e) {
    using B = minic::BinaryOp;
    TypeRef lt = unqual(e.lhs->type), rt = unqual(e.rhs->type);
    if (e.binary == B::Add || e.binary == B::Sub) {
      if (minic::is_pointer(lt) && minic::is_integer(rt)) {
        value(*e.lhs);
        value(*e.rhs);
        scale(unqual(lt->base)->size);
        emit(binary_op(e.binary), static_cast<std::int32_t>(Arith::U32));
        return;
      }
      if (e.binary == B::Add && minic::is_integer(lt) && minic::is_pointer(rt)) {
        value(*e.lhs);
        scale(unqual(rt->base)->size);
        value(*e.rhs);
        emit(Op::Add, static_cast<std::int32_t>(Arith::U32));
        return;
      }
      if (e.binary == B::Sub && minic::is_pointer(lt) && minic::is_pointer(rt)) {
        value(*e.lhs);
        value(*e.rhs);
        emit(Op::Sub, static_cast<std::int32_t>(Arith::I32));
        emit(Op::PushI, 0, unqual(lt->base)->size);
        emit(Op::Div, static_cast<std::int32_t>(Arith::I32));
        return;
      }
    }
    value(*e.lhs);
    value(*e.rhs);
    emit(binary_op(e.binary), static_cast<std::int32_t>(arith_of(e.op_type)));
  }

  void logical(const Expr& e) {
    int l_short = new_label(), l_end = new_label();
    bool is_and = e.logical == minic::LogicalOp::And;
    Op test = is_and ? Op::Jz : Op::Jnz;
    value(*e.lhs);
    jump(test, l_short, static_cast<std::int64_t>(arith_of(e.lhs->type)));
    value(*e.rhs);
    jump(test, l_short, static_cast<std::int64_t>(arith_of(e.rhs->type)));
    emit(Op::PushI, 0, is_and ? 1 : 0);
    jump(Op::Jmp, l_end);
    bind(l_short);
    emit(Op::PushI, 0, is_and ? 0 : 1);
    bind(l_end);
  }

  void assign(const Expr& e) {
    const Expr& lhs = *e.lhs;
    TypeRef lt = unqual(lhs.type);
    const minic::FieldInfo* field = is_bitfield(lhs) ? lhs.field : nullptr;
    if (!e.compound) {
      addr(lhs);
      value(*e.rhs);
      if (minic::is_aggregate(lt)) emit(Op::Copy, static_cast<std::int32_t>(lt->size));
      else store(lt, field);
      return;
    }
    addr(lhs);
    emit(Op::Dup);
    load(lt, field);
    if (minic::is_pointer(lt)) {
      value(*e.rhs);
      scale(unqual(lt->base)->size);
      emit(binary_op(*e.compound), static_cast<std::int32_t>(Arith::U32));
    } else {
      TypeRef field_type = field ? lt : lt;
      convert(field_type, e.op_type);
      value(*e.rhs);
      emit(binary_op(*e.compound), static_cast<std::int32_t>(arith_of(e.op_type)));
      convert(e.op_type, lt);
    }
    store(lt, field);
  }

  void incdec(const Expr& e) {
    const Expr& lhs = *e.lhs;
    TypeRef lt = unqual(lhs.type);
    const minic::FieldInfo* field = is_bitfield(lhs) ? lhs.field : nullptr;
    addr(lhs);
    emit(Op::Dup);
    load(lt, field);
    if (!e.prefix) {
      emit(Op::Swap);
      emit(Op::Over);
    }
    Op op = e.increment ? Op::Add : Op::Sub;
    if (minic::is_pointer(lt)) {
      emit(Op::PushI, 0, unqual(lt->base)->size);
      emit(op, static_cast<std::int32_t>(Arith::U32));
    } else if (minic::is_floating(lt)) {
      emit(Op::PushF, 0, std::bit_cast<std::int64_t>(1.0));
      emit(op, static_cast<std::int32_t>(arith_of(lt)));
    } else {
      Arith a = lt->kind == TypeKind::Unsigned && lt->size == 4 ? Arith::U32 : Arith::I32;
      emit(Op::PushI, 0, 1);
      emit(op, static_cast<std::int32_t>(a));
      Mem computed = a == Arith::U32 ? Mem::U32 : Mem::I32;
      if (computed != mem_of(lt)) emit(Op::Cvt, static_cast<std::int32_t>(computed), static_cast<std::int64_t>(mem_of(lt)));
    }
    store(lt, field);
    if (!e.prefix) emit(Op::Pop);
  }

  void call(const Expr& e) {
    for (const auto& a : e.args) value(*a);
    if (e.builtin != minic::Builtin::None) {
      Builtin b = e.builtin == minic::Builtin::Getchar ? Builtin::Getchar
                  : e.builtin == minic::Builtin::Putchar ? Builtin::Putchar
                                                          : Builtin::PrintInt;
      emit(Op::CallB, static_cast<std::int32_t>(b));
      return;
    }
    set_ip_for_call();
    emit(Op::Call, static_cast<std::int32_t>(decl_syms_.at(e.lhs->decl)), static_cast<std::int64_t>(e.args.size()));
  }

  const minic::TypedUnit& unit_;
  const minic::StopPlan& plan_;
  CodegenOptions opt_;
  ObjectModule om_;
  std::map<const Decl*, sym::Uid> uids_;
  std::map<const Decl*, std::uint32_t> decl_syms_;
  std::vector<std::uint32_t> string_syms_;
  std::vector<std::pair<const Decl*, std::uint32_t>> pending_inits_;
  std::optional<std::uint32_t> tos_sym_;

  std::vector<Instr>* code_ = nullptr;
  std::vector<int> labels_;
  std::vector<std::pair<std::size_t, int>> fixups_;
  std::vector<int> points_;
  TypeRef result_ = nullptr;
};

}  // namespace

ObjectModule compile_unit(const minic::TypedUnit& unit, const minic::StopPlan& plan, const CodegenOptions& options) {
  return UnitGen(unit, plan, options).run();
}

ModuleRecord emit_module_record(const ObjectModule& om, const std::function<std::uint32_t(std::uint32_t)>& address_of,
                                std::uint32_t vector_address) {
  ModuleRecord r;
  ByteWriter rec(r.record);
  rec.put_u32le(om.uname);
  rec.put_u32le(vector_address);
  ByteWriter vec(r.vector);
  for (std::uint32_t sym : om.address_plan) vec.put_u32le(address_of(sym));
  return r;
}

std::uint32_t make_uname(std::string_view file, std::string_view nonce) {
  std::uint32_t h = 2166136261u;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 16777619u;
    }
  };
  mix(file);
  mix(std::string_view("\0", 1));
  mix(nonce);
  return h == 0 ? 1 : h;
}

CompiledUnit compile_source(std::string_view source, const std::string& file, const CodegenOptions& options) {
  minic::Diagnostics diags;
  minic::TranslationUnit tu = minic::parse(source, file, diags);
  if (!diags.empty()) throw minic::CompileError(std::move(diags));
  CompiledUnit out{minic::typecheck(std::move(tu), diags), {}, {}};
  if (!diags.empty()) throw minic::CompileError(std::move(diags));
  out.plan = minic::plan_stopping_points(out.unit);
  out.object = compile_unit(out.unit, out.plan, options);
  return out;
}

}  // namespace cdb::codegen
