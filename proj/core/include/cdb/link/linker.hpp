#pragma once

#include <span>
#include <string>

#include "cdb/codegen/object.hpp"
#include "cdb/link/image.hpp"

namespace cdb::link {

class LinkError : public Error {
 public:
  using Error::Error;
};

// Resolves symbols across units, lays out data, generates the module-record
// table and sizes the breakpoint flags. Throws LinkError.
ExecutableImage link(std::span<const codegen::ObjectModule> objects, const std::string& entry = "main");

}  // namespace cdb::link
