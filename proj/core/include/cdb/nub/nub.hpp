#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cdb/comm/link.hpp"
#include "cdb/nub/symbol_store.hpp"
#include "cdb/sym/model.hpp"

namespace cdb::nub {

struct NubCoord {
  std::array<char, 32> file{};  // NUL-padded; truncated to 31 bytes
  std::uint16_t x = 0;
  std::uint16_t y = 0;

  static NubCoord make(std::string_view file, std::uint16_t y, std::uint16_t x);
  static NubCoord from(const sym::Coordinate& c);
  std::string file_name() const;
  sym::Coordinate coordinate() const;
  // "file:y.x"
  std::string to_string() const;
  friend bool operator==(const NubCoord&, const NubCoord&) = default;
};

struct NubContext {
  std::uint32_t uname = 0;
  sym::Uid tail = sym::kNoUid;
  friend bool operator==(const NubContext&, const NubContext&) = default;
};

struct NubState {
  std::array<char, 32> name{};
  NubCoord src;
  std::uint32_t fp = 0;  // shadow frame address
  NubContext context;

  std::string function() const;
  friend bool operator==(const NubState&, const NubState&) = default;
};

using NubCallback = std::function<void(const NubState&)>;
using NubApply = std::function<void(int i, const NubCoord& src, void* cl)>;

class NubError : public Error {
 public:
  using Error::Error;
};

// nub_frame past the outermost frame.
class FrameRangeError : public NubError {
 public:
  FrameRangeError(int requested, int max_frame);
  int max_frame() const { return max_frame_; }

 private:
  int max_frame_;
};

struct ResolvedValue {
  const sym::SymbolIndex* module = nullptr;
  const sym::Symbol* symbol = nullptr;
  sym::Uid type = sym::kNoUid;
  Bytes bytes;
};

// Debugger-side nub. All target access goes through the TargetLink as
// fetch/store/frame/continue requests.
class Nub {
 public:
  Nub(comm::TargetLink& link, SymbolStore& symbols) : link_(link), symbols_(symbols) {}

  // Runs the program to completion. startup is called once before main;
  // fault on a fault; breakpoint handlers on their own arrivals. Returns
  // the exit code.
  int init(NubCallback startup, NubCallback fault);

  void src(const NubCoord& pattern, const NubApply& apply, void* cl);
  // Both return the previously registered handler, empty if none.
  NubCallback set(const NubCoord& src, NubCallback onbreak);
  NubCallback remove(const NubCoord& src);

  std::size_t fetch(std::uint32_t space, std::uint32_t address, std::span<std::byte> out);
  std::size_t store(std::uint32_t space, std::uint32_t address, std::span<const std::byte> in);
  // Throws FrameRangeError when n exceeds the depth. Returns n.
  int frame(int n, NubState& out);

  std::optional<ResolvedValue> resolve_value(const NubState& state, std::string_view name);

  bool stopped() const { return stopped_; }
  std::uint64_t dismissed() const { return dismissed_; }
  std::uint64_t delivered() const { return delivered_; }
  std::optional<int> exit_code() const { return exit_code_; }
  // Kind of the most recent fault (vm::FaultKind values).
  std::optional<std::uint8_t> last_fault() const { return last_fault_; }
  SymbolStore& symbols() { return symbols_; }

 private:
  struct Key {
    std::uint32_t uname;
    std::uint32_t index;
    auto operator<=>(const Key&) const = default;
  };

  comm::Message request(const comm::Message& m);
  Key resolve_exact(const NubCoord& src);
  void set_flag(std::uint32_t index, std::uint8_t value);
  std::uint32_t vector_address(std::uint32_t uname);
  void fill_state(NubState& out, std::uint32_t fp, const comm::FrameReply& f);
  NubState startup_state(const comm::StartupEvent& ev);
  void in_callback(const NubCallback& cb, const NubState& s);

  comm::TargetLink& link_;
  SymbolStore& symbols_;
  bool initialized_ = false;
  bool stopped_ = false;
  bool at_startup_ = false;
  std::uint32_t tos_ = 0;
  std::map<Key, NubCallback> breakpoints_;
  std::map<std::uint32_t, int> armed_;
  std::map<std::uint32_t, std::uint32_t> vectors_;
  std::uint64_t dismissed_ = 0;
  std::uint64_t delivered_ = 0;
  std::optional<int> exit_code_;
  std::optional<std::uint8_t> last_fault_;
};

}  // namespace cdb::nub
