#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdb/support/error.hpp"

namespace cdb::minic {

// Position inside one unit's source text. Lines and columns are 1-based;
// columns count bytes, so a tab is one column.
struct Loc {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  friend auto operator<=>(const Loc&, const Loc&) = default;
};

struct Diagnostic {
  std::string file;
  Loc loc;
  std::string message;

  // "file:y.x: message"
  std::string to_string() const;
};

using Diagnostics = std::vector<Diagnostic>;

// Thrown by the driver entry points when a unit has errors.
class CompileError : public Error {
 public:
  explicit CompileError(Diagnostics diags);
  const Diagnostics& diagnostics() const { return diags_; }

 private:
  Diagnostics diags_;
};

}  // namespace cdb::minic
