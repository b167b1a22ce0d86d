#include "cdb/minic/parser.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

#include "cdb/minic/lexer.hpp"

namespace cdb::minic {

const char* spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::BitXor: return "^";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
  }
  return "?";
}

bool TypeSpec::any() const {
  return n_void + n_char + n_short + n_int + n_long + n_unsigned + n_signed + n_float + n_double > 0 ||
         !typedef_name.empty() || record || enumeration;
}

namespace {

struct SyntaxError {};

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::string& file, Diagnostics& diags)
      : toks_(std::move(toks)), file_(file), diags_(diags) {
    scopes_.emplace_back();
  }

  TranslationUnit run() {
    TranslationUnit tu;
    tu.file = file_;
    while (!at(Tok::end)) {
      try {
        external(tu);
      } catch (const SyntaxError&) {
        sync_top();
      }
    }
    return tu;
  }

 private:
  // Token access.
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const Token& at_tok, std::string msg) {
    diags_.push_back({file_, at_tok.loc, std::move(msg)});
    throw SyntaxError{};
  }
  std::string describe(const Token& t) const {
    switch (t.kind) {
      case Tok::end: return "end of file";
      case Tok::identifier: return fmt::format("'{}'", t.text);
      case Tok::int_literal:
      case Tok::float_literal:
      case Tok::char_literal: return "constant";
      case Tok::string_literal: return "string literal";
      default: return fmt::format("'{}'", spelling(t.kind));
    }
  }
  const Token& expect(Tok k) {
    if (!at(k)) fail(peek(), fmt::format("expected '{}' before {}", spelling(k), describe(peek())));
    return next();
  }

  // Recovery.
  void sync_stmt() {
    int depth = 0;
    while (!at(Tok::end)) {
      if (at(Tok::lbrace)) ++depth;
      if (at(Tok::rbrace)) {
        if (depth == 0) return;
        --depth;
        next();
        if (depth == 0) return;
        continue;
      }
      if (at(Tok::semi) && depth == 0) {
        next();
        return;
      }
      next();
    }
  }
  void sync_top() {
    int depth = 0;
    while (!at(Tok::end)) {
      if (at(Tok::lbrace)) ++depth;
      if (at(Tok::rbrace)) {
        next();
        if (depth > 0) --depth;
        if (depth == 0) return;
        continue;
      }
      if (at(Tok::semi) && depth == 0) {
        next();
        return;
      }
      next();
    }
  }

  // Typedef-name tracking: each scope maps a name to whether it is a typedef.
  bool is_typedef_name(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return false;
  }
  void declare(const std::string& name, bool is_typedef) {
    if (!name.empty()) scopes_.back()[name] = is_typedef;
  }

  bool starts_type(std::size_t k = 0) const {
    switch (peek(k).kind) {
      case Tok::kw_char: case Tok::kw_short: case Tok::kw_int: case Tok::kw_long:
      case Tok::kw_unsigned: case Tok::kw_signed: case Tok::kw_float: case Tok::kw_double:
      case Tok::kw_void: case Tok::kw_struct: case Tok::kw_union: case Tok::kw_enum:
      case Tok::kw_const: case Tok::kw_volatile:
        return true;
      case Tok::identifier:
        return is_typedef_name(peek(k).text);
      default:
        return false;
    }
  }
  bool starts_declaration() const {
    return starts_type() || at(Tok::kw_typedef) || at(Tok::kw_static) || at(Tok::kw_extern);
  }

  // Declarations.
  TypeSpec specifiers(bool allow_storage) {
    TypeSpec s;
    s.loc = peek().loc;
    bool any = false;
    for (;;) {
      const Token& t = peek();
      switch (t.kind) {
        case Tok::kw_typedef:
        case Tok::kw_static:
        case Tok::kw_extern: {
          if (!allow_storage) fail(t, fmt::format("storage class '{}' not allowed here", spelling(t.kind)));
          if (s.storage != StorageClass::None) fail(t, "multiple storage classes");
          s.storage = t.kind == Tok::kw_typedef ? StorageClass::Typedef
                      : t.kind == Tok::kw_static ? StorageClass::Static
                                                 : StorageClass::Extern;
          next();
          continue;
        }
        case Tok::kw_const: s.is_const = true; next(); continue;
        case Tok::kw_volatile: s.is_volatile = true; next(); continue;
        case Tok::kw_void: ++s.n_void; break;
        case Tok::kw_char: ++s.n_char; break;
        case Tok::kw_short: ++s.n_short; break;
        case Tok::kw_int: ++s.n_int; break;
        case Tok::kw_long: ++s.n_long; break;
        case Tok::kw_unsigned: ++s.n_unsigned; break;
        case Tok::kw_signed: ++s.n_signed; break;
        case Tok::kw_float: ++s.n_float; break;
        case Tok::kw_double: ++s.n_double; break;
        case Tok::kw_struct:
        case Tok::kw_union:
          if (any) fail(t, "two or more data types in declaration specifiers");
          s.record = record_spec();
          any = true;
          continue;
        case Tok::kw_enum:
          if (any) fail(t, "two or more data types in declaration specifiers");
          s.enumeration = enum_spec();
          any = true;
          continue;
        case Tok::identifier:
          if (!any && is_typedef_name(t.text)) {
            s.typedef_name = t.text;
            any = true;
            next();
            continue;
          }
          return s;
        default:
          return s;
      }
      any = true;
      next();
    }
  }

  std::shared_ptr<RecordSpec> record_spec() {
    auto r = std::make_shared<RecordSpec>();
    r->is_union = next().kind == Tok::kw_union;
    r->loc = peek().loc;
    if (at(Tok::identifier)) r->tag = next().text;
    if (accept(Tok::lbrace)) {
      r->has_body = true;
      while (!at(Tok::rbrace) && !at(Tok::end)) {
        TypeSpec spec = specifiers(false);
        if (!spec.any()) fail(peek(), fmt::format("expected field type before {}", describe(peek())));
        do {
          FieldSpec f;
          f.spec = spec;
          if (!at(Tok::colon)) f.decl = declarator(false);
          else f.decl.loc = peek().loc;
          if (accept(Tok::colon)) f.width = conditional();
          r->fields.push_back(std::move(f));
        } while (accept(Tok::comma));
        expect(Tok::semi);
      }
      expect(Tok::rbrace);
    } else if (r->tag.empty()) {
      fail(peek(), "expected struct tag or '{'");
    }
    return r;
  }

  std::shared_ptr<EnumSpec> enum_spec() {
    auto e = std::make_shared<EnumSpec>();
    next();
    e->loc = peek().loc;
    if (at(Tok::identifier)) e->tag = next().text;
    if (accept(Tok::lbrace)) {
      e->has_body = true;
      while (!at(Tok::rbrace)) {
        const Token& id = expect(Tok::identifier);
        Enumerator item{id.text, id.loc, nullptr};
        declare(id.text, false);
        if (accept(Tok::assign)) item.value = conditional();
        e->items.push_back(std::move(item));
        if (!accept(Tok::comma)) break;
      }
      expect(Tok::rbrace);
    } else if (e->tag.empty()) {
      fail(peek(), "expected enum tag or '{'");
    }
    return e;
  }

  Declarator declarator(bool abstract) {
    Declarator d;
    while (accept(Tok::star)) {
      PointerLevel p;
      for (;;) {
        if (accept(Tok::kw_const)) p.is_const = true;
        else if (accept(Tok::kw_volatile)) p.is_volatile = true;
        else break;
      }
      d.pointers.push_back(p);
    }
    d.loc = peek().loc;
    if (at(Tok::identifier)) {
      d.name = next().text;
    } else if (!abstract) {
      fail(peek(), fmt::format("expected identifier before {}", describe(peek())));
    }
    if (accept(Tok::lbracket)) {
      d.is_array = true;
      if (!at(Tok::rbracket)) d.array_size = conditional();
      expect(Tok::rbracket);
      if (at(Tok::lbracket)) fail(peek(), "multi-dimensional arrays are not supported");
    } else if (at(Tok::lparen) && !abstract) {
      next();
      d.is_function = true;
      if (at(Tok::kw_void) && peek(1).kind == Tok::rparen) {
        next();
      } else if (!at(Tok::rparen)) {
        do {
          ParamSpec p;
          p.spec = specifiers(false);
          if (!p.spec.any()) fail(peek(), fmt::format("expected parameter type before {}", describe(peek())));
          p.decl = declarator(true);
          d.params.push_back(std::move(p));
        } while (accept(Tok::comma));
      }
      expect(Tok::rparen);
    }
    return d;
  }

  std::unique_ptr<Declaration> declaration_rest(TypeSpec spec, Declarator first) {
    auto decl = std::make_unique<Declaration>();
    decl->loc = spec.loc;
    decl->spec = std::move(spec);
    bool is_typedef = decl->spec.storage == StorageClass::Typedef;
    Declarator d = std::move(first);
    for (;;) {
      declare(d.name, is_typedef);
      InitDeclarator id;
      id.decl = std::move(d);
      if (accept(Tok::assign)) id.init = initializer();
      decl->declarators.push_back(std::move(id));
      if (!accept(Tok::comma)) break;
      d = declarator(false);
    }
    expect(Tok::semi);
    return decl;
  }

  std::unique_ptr<Declaration> declaration() {
    TypeSpec spec = specifiers(true);
    if (accept(Tok::semi)) {
      auto decl = std::make_unique<Declaration>();
      decl->loc = spec.loc;
      decl->spec = std::move(spec);
      return decl;
    }
    Declarator d = declarator(false);
    return declaration_rest(std::move(spec), std::move(d));
  }

  ExprPtr initializer() {
    if (!at(Tok::lbrace)) return assignment();
    auto e = std::make_unique<Expr>(ExprKind::InitList, next().loc);
    while (!at(Tok::rbrace)) {
      e->args.push_back(initializer());
      if (!accept(Tok::comma)) break;
    }
    expect(Tok::rbrace);
    return e;
  }

  void external(TranslationUnit& tu) {
    if (!starts_declaration()) fail(peek(), fmt::format("expected declaration before {}", describe(peek())));
    TypeSpec spec = specifiers(true);
    if (accept(Tok::semi)) {
      auto decl = std::make_unique<Declaration>();
      decl->loc = spec.loc;
      decl->spec = std::move(spec);
      tu.items.push_back({std::move(decl), nullptr});
      return;
    }
    Declarator d = declarator(false);
    if (d.is_function && at(Tok::lbrace)) {
      auto fn = std::make_unique<FunctionDef>();
      fn->spec = std::move(spec);
      fn->decl = std::move(d);
      declare(fn->decl.name, false);
      scopes_.emplace_back();
      for (const auto& p : fn->decl.params) declare(p.decl.name, false);
      try {
        fn->body = block(false);
      } catch (...) {
        scopes_.pop_back();
        throw;
      }
      scopes_.pop_back();
      tu.items.push_back({nullptr, std::move(fn)});
      return;
    }
    tu.items.push_back({declaration_rest(std::move(spec), std::move(d)), nullptr});
  }

  // Statements.
  StmtPtr block(bool new_scope) {
    const Token& open = expect(Tok::lbrace);
    auto s = std::make_unique<Stmt>(StmtKind::Block, open.loc);
    if (new_scope) scopes_.emplace_back();
    while (!at(Tok::rbrace) && !at(Tok::end)) {
      try {
        s->body.push_back(statement());
      } catch (const SyntaxError&) {
        sync_stmt();
      }
    }
    if (new_scope) scopes_.pop_back();
    s->close = peek().loc;
    expect(Tok::rbrace);
    return s;
  }

  StmtPtr statement() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::lbrace:
        return block(true);
      case Tok::semi:
        next();
        return std::make_unique<Stmt>(StmtKind::Empty, t.loc);
      case Tok::kw_if: {
        auto s = std::make_unique<Stmt>(StmtKind::If, next().loc);
        expect(Tok::lparen);
        s->expr = expression();
        expect(Tok::rparen);
        s->then_body = statement();
        if (accept(Tok::kw_else)) s->else_body = statement();
        return s;
      }
      case Tok::kw_while: {
        auto s = std::make_unique<Stmt>(StmtKind::While, next().loc);
        expect(Tok::lparen);
        s->expr = expression();
        expect(Tok::rparen);
        s->then_body = statement();
        return s;
      }
      case Tok::kw_for: {
        auto s = std::make_unique<Stmt>(StmtKind::For, next().loc);
        expect(Tok::lparen);
        if (!at(Tok::semi)) s->init = expression();
        expect(Tok::semi);
        if (!at(Tok::semi)) s->expr = expression();
        expect(Tok::semi);
        if (!at(Tok::rparen)) s->step = expression();
        expect(Tok::rparen);
        s->then_body = statement();
        return s;
      }
      case Tok::kw_return: {
        auto s = std::make_unique<Stmt>(StmtKind::Return, next().loc);
        if (!at(Tok::semi)) s->expr = expression();
        expect(Tok::semi);
        return s;
      }
      default:
        break;
    }
    if (starts_declaration()) {
      auto s = std::make_unique<Stmt>(StmtKind::Decl, t.loc);
      s->decl = declaration();
      return s;
    }
    auto s = std::make_unique<Stmt>(StmtKind::Expr, t.loc);
    s->expr = expression();
    expect(Tok::semi);
    return s;
  }

  // Expressions.
  ExprPtr expression() { return assignment(); }

  static std::optional<BinaryOp> compound_op(Tok k) {
    switch (k) {
      case Tok::plus_assign: return BinaryOp::Add;
      case Tok::minus_assign: return BinaryOp::Sub;
      case Tok::star_assign: return BinaryOp::Mul;
      case Tok::slash_assign: return BinaryOp::Div;
      case Tok::percent_assign: return BinaryOp::Mod;
      case Tok::amp_assign: return BinaryOp::BitAnd;
      case Tok::pipe_assign: return BinaryOp::BitOr;
      case Tok::caret_assign: return BinaryOp::BitXor;
      case Tok::shl_assign: return BinaryOp::Shl;
      case Tok::shr_assign: return BinaryOp::Shr;
      default: return std::nullopt;
    }
  }

  ExprPtr assignment() {
    ExprPtr lhs = conditional();
    Tok k = peek().kind;
    if (k == Tok::assign || compound_op(k)) {
      next();
      auto e = std::make_unique<Expr>(ExprKind::Assign, lhs->loc);
      e->compound = compound_op(k);
      e->lhs = std::move(lhs);
      e->rhs = assignment();
      return e;
    }
    return lhs;
  }

  // No ?: operator; this is the top of the binary-operator ladder.
  ExprPtr conditional() { return logical_or(); }

  ExprPtr logical_or() {
    ExprPtr e = logical_and();
    while (at(Tok::pipepipe)) {
      next();
      auto n = std::make_unique<Expr>(ExprKind::Logical, e->loc);
      n->logical = LogicalOp::Or;
      n->lhs = std::move(e);
      n->rhs = logical_and();
      e = std::move(n);
    }
    return e;
  }

  ExprPtr logical_and() {
    ExprPtr e = binary(0);
    while (at(Tok::ampamp)) {
      next();
      auto n = std::make_unique<Expr>(ExprKind::Logical, e->loc);
      n->logical = LogicalOp::And;
      n->lhs = std::move(e);
      n->rhs = binary(0);
      e = std::move(n);
    }
    return e;
  }

  static int precedence(Tok k, BinaryOp& op) {
    switch (k) {
      case Tok::pipe: op = BinaryOp::BitOr; return 1;
      case Tok::caret: op = BinaryOp::BitXor; return 2;
      case Tok::amp: op = BinaryOp::BitAnd; return 3;
      case Tok::eqeq: op = BinaryOp::Eq; return 4;
      case Tok::ne: op = BinaryOp::Ne; return 4;
      case Tok::lt: op = BinaryOp::Lt; return 5;
      case Tok::le: op = BinaryOp::Le; return 5;
      case Tok::gt: op = BinaryOp::Gt; return 5;
      case Tok::ge: op = BinaryOp::Ge; return 5;
      case Tok::shl: op = BinaryOp::Shl; return 6;
      case Tok::shr: op = BinaryOp::Shr; return 6;
      case Tok::plus: op = BinaryOp::Add; return 7;
      case Tok::minus: op = BinaryOp::Sub; return 7;
      case Tok::star: op = BinaryOp::Mul; return 8;
      case Tok::slash: op = BinaryOp::Div; return 8;
      case Tok::percent: op = BinaryOp::Mod; return 8;
      default: return -1;
    }
  }

  ExprPtr binary(int min_prec) {
    ExprPtr e = unary();
    for (;;) {
      BinaryOp op{};
      int p = precedence(peek().kind, op);
      if (p < 0 || p < min_prec) return e;
      next();
      ExprPtr rhs = binary(p + 1);
      auto n = std::make_unique<Expr>(ExprKind::Binary, e->loc);
      n->binary = op;
      n->lhs = std::move(e);
      n->rhs = std::move(rhs);
      e = std::move(n);
    }
  }

  std::shared_ptr<TypeName> type_name() {
    auto tn = std::make_shared<TypeName>();
    tn->spec = specifiers(false);
    tn->decl = declarator(true);
    if (!tn->decl.name.empty()) fail(peek(), "unexpected identifier in type name");
    return tn;
  }

  ExprPtr unary() {
    const Token& t = peek();
    auto make_unary = [&](UnaryOp op) {
      next();
      auto e = std::make_unique<Expr>(ExprKind::Unary, t.loc);
      e->unary = op;
      e->lhs = unary();
      return e;
    };
    switch (t.kind) {
      case Tok::minus: return make_unary(UnaryOp::Neg);
      case Tok::plus: return make_unary(UnaryOp::Plus);
      case Tok::bang: return make_unary(UnaryOp::Not);
      case Tok::tilde: return make_unary(UnaryOp::BitNot);
      case Tok::star: return make_unary(UnaryOp::Deref);
      case Tok::amp: return make_unary(UnaryOp::AddrOf);
      case Tok::plusplus:
      case Tok::minusminus: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::IncDec, t.loc);
        e->increment = t.kind == Tok::plusplus;
        e->prefix = true;
        e->lhs = unary();
        return e;
      }
      case Tok::lparen:
        if (starts_type(1)) {
          next();
          auto e = std::make_unique<Expr>(ExprKind::Cast, t.loc);
          e->type_name = type_name();
          expect(Tok::rparen);
          e->lhs = unary();
          return e;
        }
        break;
      case Tok::kw_sizeof: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::Sizeof, t.loc);
        if (at(Tok::lparen) && starts_type(1)) {
          next();
          e->type_name = type_name();
          expect(Tok::rparen);
        } else {
          e->lhs = unary();
        }
        return e;
      }
      default:
        break;
    }
    return postfix(primary());
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::lbracket) {
        next();
        auto n = std::make_unique<Expr>(ExprKind::Index, e->loc);
        n->lhs = std::move(e);
        n->rhs = expression();
        expect(Tok::rbracket);
        e = std::move(n);
      } else if (t.kind == Tok::lparen) {
        next();
        auto n = std::make_unique<Expr>(ExprKind::Call, e->loc);
        n->lhs = std::move(e);
        if (!at(Tok::rparen)) {
          do {
            n->args.push_back(assignment());
          } while (accept(Tok::comma));
        }
        expect(Tok::rparen);
        e = std::move(n);
      } else if (t.kind == Tok::dot || t.kind == Tok::arrow) {
        next();
        auto n = std::make_unique<Expr>(ExprKind::Member, e->loc);
        n->arrow = t.kind == Tok::arrow;
        n->text = expect(Tok::identifier).text;
        n->lhs = std::move(e);
        e = std::move(n);
      } else if (t.kind == Tok::plusplus || t.kind == Tok::minusminus) {
        next();
        auto n = std::make_unique<Expr>(ExprKind::IncDec, e->loc);
        n->increment = t.kind == Tok::plusplus;
        n->prefix = false;
        n->lhs = std::move(e);
        e = std::move(n);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::int_literal:
      case Tok::char_literal: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::IntLit, t.loc);
        e->int_value = static_cast<std::int64_t>(t.int_value);
        e->is_unsigned = t.is_unsigned || t.int_value > 0x7fffffffu;
        return e;
      }
      case Tok::float_literal: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::FloatLit, t.loc);
        e->float_value = t.float_value;
        return e;
      }
      case Tok::string_literal: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::StringLit, t.loc);
        e->text = t.text;
        while (at(Tok::string_literal)) e->text += next().text;
        return e;
      }
      case Tok::identifier: {
        next();
        auto e = std::make_unique<Expr>(ExprKind::Name, t.loc);
        e->text = t.text;
        return e;
      }
      case Tok::lparen: {
        next();
        ExprPtr e = expression();
        expect(Tok::rparen);
        // A parenthesized expression starts at its '('.
        e->loc = t.loc;
        return e;
      }
      default:
        fail(t, fmt::format("expected expression before {}", describe(t)));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::string& file_;
  Diagnostics& diags_;
  std::vector<std::map<std::string, bool>> scopes_;
};

}  // namespace

TranslationUnit parse(std::string_view source, const std::string& file, Diagnostics& diags) {
  std::vector<Token> toks = tokenize(source, file, diags);
  return Parser(std::move(toks), file, diags).run();
}

}  // namespace cdb::minic
