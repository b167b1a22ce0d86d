#pragma once

#include <stdexcept>
#include <string>

namespace cdb {

// Root of every exception thrown by the toolchain and debugger.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdb
