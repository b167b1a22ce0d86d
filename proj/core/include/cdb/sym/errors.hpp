#pragma once

#include <string>

#include "cdb/support/error.hpp"

namespace cdb::sym {

enum class SymtabErrc {
  bad_magic,
  truncated,
  malformed,
  checksum,
  trailing_data,
  dangling_uid,
  invariant,
};

const char* to_string(SymtabErrc code);

// Failure to read or validate a symbol-table module.
class SymtabError : public Error {
 public:
  SymtabError(SymtabErrc code, const std::string& detail)
      : Error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  SymtabErrc code() const { return code_; }

 private:
  SymtabErrc code_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdb::sym
