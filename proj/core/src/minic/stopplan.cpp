#include "cdb/minic/stopplan.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace cdb::minic {

const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::Expr: return "expr";
    case StopKind::CompoundEntry: return "compound-entry";
    case StopKind::CompoundExit: return "compound-exit";
  }
  return "?";
}

namespace {

class Planner {
 public:
  explicit Planner(const std::string& file) : file_(file) {}

  StopPlan run(TypedUnit& u) {
    for (FunctionInfo* f : u.functions) {
      fn_ = f;
      f->entry_stop = add(f->body_loc, StopKind::CompoundEntry, f->entry_tail);
      for (auto& s : f->def->body->body) stmt(*s);
    }
    return std::move(plan_);
  }

 private:
  int add(Loc loc, StopKind kind, const Decl* tail) {
    if (!plan_.empty() && !(plan_.back().loc < loc)) {
      throw std::logic_error(fmt::format("{}:{}.{}: stopping points out of source order", file_, loc.line, loc.col));
    }
    int index = static_cast<int>(plan_.size());
    plan_.push_back({index, loc, kind, tail, fn_});
    return index;
  }

  void point(Expr& e, const Decl* tail) {
    e.stop = add(e.loc, StopKind::Expr, tail);
    expr(e, tail);
  }

  void stmt(Stmt& s) {
    const Decl* tail = s.scope_tail;
    switch (s.kind) {
      case StmtKind::Expr:
        point(*s.expr, tail);
        break;
      case StmtKind::Empty:
        s.stop = add(s.loc, StopKind::Expr, tail);
        break;
      case StmtKind::Block:
        for (auto& b : s.body) stmt(*b);
        break;
      case StmtKind::If:
        point(*s.expr, tail);
        stmt(*s.then_body);
        if (s.else_body) stmt(*s.else_body);
        break;
      case StmtKind::While:
        point(*s.expr, tail);
        stmt(*s.then_body);
        break;
      case StmtKind::For:
        if (s.init) point(*s.init, tail);
        if (s.expr) point(*s.expr, tail);
        if (s.step) point(*s.step, tail);
        stmt(*s.then_body);
        break;
      case StmtKind::Return:
        if (s.expr) point(*s.expr, tail);
        else s.stop = add(s.loc, StopKind::Expr, tail);
        break;
      case StmtKind::Decl:
        for (auto& id : s.decl->declarators) {
          if (!id.init || !id.symbol || id.symbol->static_storage) continue;
          point(*id.init, id.symbol);
        }
        break;
    }
  }

  // Right operands of && and || are stopping points of their own.
  void expr(Expr& e, const Decl* tail) {
    if (e.kind == ExprKind::Logical) {
      expr(*e.lhs, tail);
      point(*e.rhs, tail);
      return;
    }
    if (e.lhs) expr(*e.lhs, tail);
    if (e.rhs) expr(*e.rhs, tail);
    for (auto& a : e.args) expr(*a, tail);
  }

  const std::string& file_;
  const FunctionInfo* fn_ = nullptr;
  StopPlan plan_;
};

}  // namespace

StopPlan plan_stopping_points(TypedUnit& unit) { return Planner(unit.file).run(unit); }

}  // namespace cdb::minic
