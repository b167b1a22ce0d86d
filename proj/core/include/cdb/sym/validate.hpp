#pragma once

#include "cdb/sym/errors.hpp"
#include "cdb/sym/model.hpp"

namespace cdb::sym {

// Checks every module invariant: uid uniqueness and range, referential
// closure, uplink acyclicity, per-type layout rules, spoint tails. Throws
// SymtabError (dangling_uid or invariant) on the first violation.
void validate(const Module& m);

bool is_valid(const Module& m);

}  // namespace cdb::sym
