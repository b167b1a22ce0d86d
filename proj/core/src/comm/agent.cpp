#include "cdb/comm/agent.hpp"

#include <fmt/format.h>

namespace cdb::comm {

StartupEvent TargetAgent::startup() const {
  const auto& image = machine_.image();
  return {image.functions.at(image.entry).uname, machine_.tos()};
}

Message TargetAgent::event_for(const vm::RunStatus& s) const {
  if (const auto* b = std::get_if<vm::StoppedAt>(&s)) return BreakEvent{b->spoint, b->uname, machine_.tos()};
  if (const auto* f = std::get_if<vm::Faulted>(&s)) {
    return FaultEvent{static_cast<std::uint8_t>(f->kind), f->spoint, f->uname, machine_.tos()};
  }
  if (const auto* e = std::get_if<vm::Exited>(&s)) return ExitEvent{e->code};
  return ErrorReply{"target has not started"};
}

Message TargetAgent::handle(const Message& request) {
  if (exited()) return ErrorReply{"target has exited"};
  try {
    if (const auto* m = std::get_if<Fetch>(&request)) {
      if (m->length > kMaxFrame / 2) return ErrorReply{fmt::format("fetch of {} bytes is too large", m->length)};
      Bytes out(m->length);
      out.resize(machine_.fetch(m->space, m->address, out));
      return FetchReply{std::move(out)};
    }
    if (const auto* m = std::get_if<Store>(&request)) {
      return StoreReply{static_cast<std::uint32_t>(machine_.store(m->space, m->address, m->bytes))};
    }
    if (const auto* m = std::get_if<FlagsWrite>(&request)) {
      std::byte v{m->value};
      return StoreReply{static_cast<std::uint32_t>(
          machine_.store(static_cast<std::uint32_t>(link::Space::BreakpointFlags), m->index, {&v, 1}))};
    }
    if (const auto* m = std::get_if<FrameRead>(&request)) {
      std::byte raw[codegen::kFrameHeaderSize];
      if (machine_.fetch(0, m->address, raw) != sizeof raw) {
        return ErrorReply{fmt::format("no shadow frame at {:#x}", m->address)};
      }
      ByteReader r(raw);
      FrameReply f;
      f.up = r.get_u32le();
      f.down = r.get_u32le();
      f.func = r.get_u32le();
      f.module = r.get_u32le();
      f.ip = static_cast<std::int32_t>(r.get_u32le());
      return f;
    }
    if (std::holds_alternative<Continue>(request)) return event_for(machine_.resume());
  } catch (const vm::UsageError& e) {
    return ErrorReply{e.what()};
  }
  return ErrorReply{fmt::format("unexpected {} request", kind_name(request))};
}

}  // namespace cdb::comm
