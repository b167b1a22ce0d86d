#pragma once

#include <string>
#include <string_view>

#include "cdb/minic/ast.hpp"

namespace cdb::minic {

// Parses one unit. Syntax errors are appended to diags; the parser recovers
// at statement and declaration boundaries, so several errors can be
// reported and the returned tree holds whatever parsed cleanly.
TranslationUnit parse(std::string_view source, const std::string& file, Diagnostics& diags);

}  // namespace cdb::minic
