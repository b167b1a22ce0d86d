#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "cdb/support/bytes.hpp"

namespace cdb::comm {

// Requests flow debugger -> target, events target -> debugger.
struct Fetch {
  std::uint32_t space = 0;
  std::uint32_t address = 0;
  std::uint32_t length = 0;
  friend bool operator==(const Fetch&, const Fetch&) = default;
};
struct Store {
  std::uint32_t space = 0;
  std::uint32_t address = 0;
  Bytes bytes;
  friend bool operator==(const Store&, const Store&) = default;
};
struct FlagsWrite {
  std::uint32_t index = 0;
  std::uint8_t value = 0;
  friend bool operator==(const FlagsWrite&, const FlagsWrite&) = default;
};
struct BreakEvent {
  std::uint32_t spoint = 0;
  std::uint32_t uname = 0;
  std::uint32_t tos = 0;
  friend bool operator==(const BreakEvent&, const BreakEvent&) = default;
};
struct FaultEvent {
  std::uint8_t kind = 0;
  std::int32_t spoint = -1;
  std::uint32_t uname = 0;
  std::uint32_t tos = 0;
  friend bool operator==(const FaultEvent&, const FaultEvent&) = default;
};
struct StartupEvent {
  std::uint32_t entry_uname = 0;
  std::uint32_t tos = 0;
  friend bool operator==(const StartupEvent&, const StartupEvent&) = default;
};
struct Continue {
  friend bool operator==(const Continue&, const Continue&) = default;
};
struct FrameRead {
  std::uint32_t address = 0;
  friend bool operator==(const FrameRead&, const FrameRead&) = default;
};
struct ExitEvent {
  std::int32_t code = 0;
  friend bool operator==(const ExitEvent&, const ExitEvent&) = default;
};
struct ErrorReply {
  std::string message;
  friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};
struct FetchReply {
  Bytes bytes;
  friend bool operator==(const FetchReply&, const FetchReply&) = default;
};
struct StoreReply {
  std::uint32_t count = 0;
  friend bool operator==(const StoreReply&, const StoreReply&) = default;
};
struct FrameReply {
  std::uint32_t up = 0;
  std::uint32_t down = 0;
  std::uint32_t func = 0;
  std::uint32_t module = 0;
  std::int32_t ip = 0;
  friend bool operator==(const FrameReply&, const FrameReply&) = default;
};

// The kind byte on the wire is the alternative index + 1.
//
//   Fetch -> FetchReply        Store, FlagsWrite -> StoreReply
//   FrameRead -> FrameReply    Continue -> BreakEvent | FaultEvent | ExitEvent
//
// and any request may be answered by ErrorReply.
using Message = std::variant<Fetch, Store, FlagsWrite, BreakEvent, FaultEvent, StartupEvent, Continue, FrameRead,
                             ExitEvent, ErrorReply, FetchReply, StoreReply, FrameReply>;

const char* kind_name(const Message& m);

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Frame: u32 LE length of what follows, kind byte, fixed-width LE payload.
// Byte strings carry a u32 length prefix.
Bytes encode(const Message& m);
// Decodes exactly one whole frame. Throws ProtocolError.
Message decode(std::span<const std::byte> frame);

// Returns the size of the first complete frame in buf, or nullopt when more
// bytes are needed. Throws ProtocolError for impossible lengths.
std::optional<std::size_t> frame_size(std::span<const std::byte> buf);

inline constexpr std::uint32_t kMaxFrame = 16u << 20;

}  // namespace cdb::comm
