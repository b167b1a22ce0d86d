#pragma once

#include <vector>

#include "cdb/minic/sema.hpp"

namespace cdb::minic {

enum class StopKind { Expr, CompoundEntry, CompoundExit };

struct StopPoint {
  int index = 0;
  Loc loc;
  StopKind kind = StopKind::Expr;
  const Decl* tail = nullptr;  // nullptr: the file-scope tail
  const FunctionInfo* function = nullptr;
};

using StopPlan = std::vector<StopPoint>;

// Numbers the unit's stopping points in source order and records each
// point's index on the tree node that owns it (Expr::stop, Stmt::stop,
// FunctionInfo::entry_stop).
StopPlan plan_stopping_points(TypedUnit& unit);

const char* to_string(StopKind k);

}  // namespace cdb::minic
