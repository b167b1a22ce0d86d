#include "cdb/comm/message.hpp"

#include <fmt/format.h>

namespace cdb::comm {

namespace {

void put_bytes(ByteWriter& w, const Bytes& b) {
  w.put_u32le(static_cast<std::uint32_t>(b.size()));
  w.put_bytes(b);
}

Bytes get_bytes(ByteReader& r) {
  std::uint32_t n = r.get_u32le();
  if (n > r.remaining()) throw ProtocolError("byte string exceeds frame");
  auto s = r.get_bytes(n);
  return {s.begin(), s.end()};
}

void put_i32(ByteWriter& w, std::int32_t v) { w.put_u32le(static_cast<std::uint32_t>(v)); }
std::int32_t get_i32(ByteReader& r) { return static_cast<std::int32_t>(r.get_u32le()); }

struct Encoder {
  ByteWriter& w;
  void operator()(const Fetch& m) {
    w.put_u32le(m.space);
    w.put_u32le(m.address);
    w.put_u32le(m.length);
  }
  void operator()(const Store& m) {
    w.put_u32le(m.space);
    w.put_u32le(m.address);
    put_bytes(w, m.bytes);
  }
  void operator()(const FlagsWrite& m) {
    w.put_u32le(m.index);
    w.put_u8(m.value);
  }
  void operator()(const BreakEvent& m) {
    w.put_u32le(m.spoint);
    w.put_u32le(m.uname);
    w.put_u32le(m.tos);
  }
  void operator()(const FaultEvent& m) {
    w.put_u8(m.kind);
    put_i32(w, m.spoint);
    w.put_u32le(m.uname);
    w.put_u32le(m.tos);
  }
  void operator()(const StartupEvent& m) {
    w.put_u32le(m.entry_uname);
    w.put_u32le(m.tos);
  }
  void operator()(const Continue&) {}
  void operator()(const FrameRead& m) { w.put_u32le(m.address); }
  void operator()(const ExitEvent& m) { put_i32(w, m.code); }
  void operator()(const ErrorReply& m) {
    w.put_u32le(static_cast<std::uint32_t>(m.message.size()));
    w.put_bytes(as_bytes(m.message));
  }
  void operator()(const FetchReply& m) { put_bytes(w, m.bytes); }
  void operator()(const StoreReply& m) { w.put_u32le(m.count); }
  void operator()(const FrameReply& m) {
    w.put_u32le(m.up);
    w.put_u32le(m.down);
    w.put_u32le(m.func);
    w.put_u32le(m.module);
    put_i32(w, m.ip);
  }
};

Message decode_payload(std::uint8_t kind, ByteReader& r) {
  switch (kind) {
    case 1: {
      Fetch m;
      m.space = r.get_u32le();
      m.address = r.get_u32le();
      m.length = r.get_u32le();
      return m;
    }
    case 2: {
      Store m;
      m.space = r.get_u32le();
      m.address = r.get_u32le();
      m.bytes = get_bytes(r);
      return m;
    }
    case 3: {
      FlagsWrite m;
      m.index = r.get_u32le();
      m.value = r.get_u8();
      return m;
    }
    case 4: {
      BreakEvent m;
      m.spoint = r.get_u32le();
      m.uname = r.get_u32le();
      m.tos = r.get_u32le();
      return m;
    }
    case 5: {
      FaultEvent m;
      m.kind = r.get_u8();
      m.spoint = get_i32(r);
      m.uname = r.get_u32le();
      m.tos = r.get_u32le();
      return m;
    }
    case 6: {
      StartupEvent m;
      m.entry_uname = r.get_u32le();
      m.tos = r.get_u32le();
      return m;
    }
    case 7:
      return Continue{};
    case 8:
      return FrameRead{r.get_u32le()};
    case 9:
      return ExitEvent{get_i32(r)};
    case 10: {
      Bytes b = get_bytes(r);
      return ErrorReply{std::string(reinterpret_cast<const char*>(b.data()), b.size())};
    }
    case 11:
      return FetchReply{get_bytes(r)};
    case 12:
      return StoreReply{r.get_u32le()};
    case 13: {
      FrameReply m;
      m.up = r.get_u32le();
      m.down = r.get_u32le();
      m.func = r.get_u32le();
      m.module = r.get_u32le();
      m.ip = get_i32(r);
      return m;
    }
    default:
      throw ProtocolError(fmt::format("unknown message kind {}", kind));
  }
}

}  // namespace

const char* kind_name(const Message& m) {
  static constexpr const char* names[] = {"FETCH",      "STORE",      "FLAGS_WRITE", "BREAK_EVENT", "FAULT_EVENT",
                                          "STARTUP_EVENT", "CONTINUE", "FRAME_READ",  "EXIT_EVENT",  "ERROR",
                                          "FETCH_REPLY", "STORE_REPLY", "FRAME_REPLY"};
  return names[m.index()];
}

Bytes encode(const Message& m) {
  ByteWriter body;
  body.put_u8(static_cast<std::uint8_t>(m.index() + 1));
  std::visit(Encoder{body}, m);
  Bytes out;
  ByteWriter w(out);
  w.put_u32le(static_cast<std::uint32_t>(body.size()));
  w.put_bytes(body.bytes());
  return out;
}

std::optional<std::size_t> frame_size(std::span<const std::byte> buf) {
  if (buf.size() < 4) return std::nullopt;
  std::uint32_t n = ByteReader(buf.first(4)).get_u32le();
  if (n == 0 || n > kMaxFrame) throw ProtocolError(fmt::format("bad frame length {}", n));
  if (buf.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  return 4 + static_cast<std::size_t>(n);
}

Message decode(std::span<const std::byte> frame) {
  auto size = frame_size(frame);
  if (!size) throw ProtocolError("truncated frame");
  if (*size != frame.size()) throw ProtocolError("trailing bytes after frame");
  ByteReader r(frame.subspan(4));
  try {
    std::uint8_t kind = r.get_u8();
    Message m = decode_payload(kind, r);
    if (!r.at_end()) throw ProtocolError(fmt::format("{} bytes left over in {} frame", r.remaining(), kind_name(m)));
    return m;
  } catch (const TruncatedInput&) {
    throw ProtocolError("frame payload too short");
  }
}

}  // namespace cdb::comm
