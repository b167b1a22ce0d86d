#include "cdb/nub/nub.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

#include "cdb/sym/query.hpp"

namespace cdb::nub {

using namespace cdb::comm;

namespace {

template <std::size_t N>
void copy_name(std::array<char, N>& out, std::string_view s) {
  out.fill('\0');
  std::memcpy(out.data(), s.data(), std::min(s.size(), N - 1));
}

template <std::size_t N>
std::string from_name(const std::array<char, N>& a) {
  return std::string(a.data(), strnlen(a.data(), N));
}

std::uint32_t le32(std::span<const std::byte> b) { return ByteReader(b.first(4)).get_u32le(); }

}  // namespace

NubCoord NubCoord::make(std::string_view file, std::uint16_t y, std::uint16_t x) {
  NubCoord c;
  copy_name(c.file, file);
  c.y = y;
  c.x = x;
  return c;
}

NubCoord NubCoord::from(const sym::Coordinate& c) {
  return make(c.file, static_cast<std::uint16_t>(c.y), static_cast<std::uint16_t>(c.x));
}

std::string NubCoord::file_name() const { return from_name(file); }

sym::Coordinate NubCoord::coordinate() const { return {file_name(), x, y}; }

std::string NubCoord::to_string() const { return fmt::format("{}:{}.{}", file_name(), y, x); }

std::string NubState::function() const { return from_name(name); }

FrameRangeError::FrameRangeError(int requested, int max_frame)
    : NubError(max_frame < 0 ? fmt::format("no frame {}: there are no active frames", requested)
                             : fmt::format("no frame {}: the outermost frame is {}", requested, max_frame)),
      max_frame_(max_frame) {}

Message Nub::request(const Message& m) {
  Message reply = link_.request(m);
  if (const auto* e = std::get_if<ErrorReply>(&reply)) throw NubError(e->message);
  return reply;
}

std::size_t Nub::fetch(std::uint32_t space, std::uint32_t address, std::span<std::byte> out) {
  if (out.empty()) return 0;
  auto reply = std::get<FetchReply>(request(Fetch{space, address, static_cast<std::uint32_t>(out.size())}));
  std::size_t n = std::min(out.size(), reply.bytes.size());
  std::memcpy(out.data(), reply.bytes.data(), n);
  return n;
}

std::size_t Nub::store(std::uint32_t space, std::uint32_t address, std::span<const std::byte> in) {
  if (in.empty()) return 0;
  return std::get<StoreReply>(request(Store{space, address, Bytes(in.begin(), in.end())})).count;
}

void Nub::set_flag(std::uint32_t index, std::uint8_t value) {
  auto reply = std::get<StoreReply>(request(FlagsWrite{index, value}));
  if (reply.count != 1) throw NubError(fmt::format("breakpoint flag {} is out of range", index));
}

Nub::Key Nub::resolve_exact(const NubCoord& src) {
  if (!stopped_) throw NubError("the target is not stopped");
  sym::Coordinate want = src.coordinate();
  if (want.file.empty() || want.x == 0 || want.y == 0) {
    throw NubError(fmt::format("{} is not an exact source coordinate", src.to_string()));
  }
  std::optional<Key> found;
  for (std::uint32_t u : symbols_.unames()) {
    const auto* m = symbols_.find(u);
    if (!m) continue;
    for (const auto& match : sym::find_spoints(m->module(), want)) {
      if (found) throw NubError(fmt::format("{} names more than one stopping point", src.to_string()));
      found = Key{u, static_cast<std::uint32_t>(match.index)};
    }
  }
  if (!found) throw NubError(fmt::format("no stopping point at {}", src.to_string()));
  return *found;
}

void Nub::src(const NubCoord& pattern, const NubApply& apply, void* cl) {
  sym::Coordinate p = pattern.coordinate();
  for (std::uint32_t u : symbols_.unames()) {
    const auto* m = symbols_.find(u);
    if (!m) continue;
    for (const auto& match : sym::find_spoints(m->module(), p)) {
      apply(static_cast<int>(match.index), NubCoord::from(match.spoint->src), cl);
    }
  }
}

NubCallback Nub::set(const NubCoord& src, NubCallback onbreak) {
  Key k = resolve_exact(src);
  auto it = breakpoints_.find(k);
  if (it != breakpoints_.end()) {
    NubCallback old = std::move(it->second);
    it->second = std::move(onbreak);
    return old;
  }
  if (armed_[k.index]++ == 0) set_flag(k.index, 1);
  breakpoints_.emplace(k, std::move(onbreak));
  return {};
}

NubCallback Nub::remove(const NubCoord& src) {
  Key k = resolve_exact(src);
  auto it = breakpoints_.find(k);
  if (it == breakpoints_.end()) return {};
  NubCallback old = std::move(it->second);
  breakpoints_.erase(it);
  if (--armed_[k.index] == 0) {
    armed_.erase(k.index);
    set_flag(k.index, 0);
  }
  return old;
}

void Nub::fill_state(NubState& out, std::uint32_t fp, const FrameReply& f) {
  out = NubState{};
  out.fp = fp;
  out.context.uname = f.module;
  const auto* m = symbols_.find(f.module);
  if (!m) {
    copy_name(out.name, fmt::format("?{:08x}", f.module));
    return;
  }
  if (const auto* s = m->symbol(f.func)) {
    copy_name(out.name, s->id);
    out.src = NubCoord::from(s->src);
  }
  const auto& spoints = m->module().spoints;
  if (f.ip >= 0 && static_cast<std::size_t>(f.ip) < spoints.size()) {
    out.src = NubCoord::from(spoints[f.ip].src);
    out.context.tail = spoints[f.ip].tail;
  }
}

int Nub::frame(int n, NubState& out) {
  if (!stopped_) throw NubError("the target is not stopped");
  if (n < 0) throw FrameRangeError(n, -1);
  std::uint32_t addr = tos_;
  std::uint32_t above = 0;
  for (int k = 0;; ++k) {
    if (addr == 0) throw FrameRangeError(n, k - 1);
    auto f = std::get<FrameReply>(request(FrameRead{addr}));
    if (f.module == 0) throw FrameRangeError(n, k - 1);  // base sentinel
    if (above != 0 && f.up != above) {
      std::byte word[4];
      for (int i = 0; i < 4; ++i) word[i] = static_cast<std::byte>((above >> (8 * i)) & 0xff);
      store(0, addr, word);
      f.up = above;
    }
    if (k == n) {
      fill_state(out, addr, f);
      return n;
    }
    above = addr;
    addr = f.down;
  }
}

std::uint32_t Nub::vector_address(std::uint32_t uname) {
  if (auto it = vectors_.find(uname); it != vectors_.end()) return it->second;
  for (std::uint32_t at = 0;; at += link::kModuleRecordSize) {
    std::byte rec[link::kModuleRecordSize];
    if (fetch(static_cast<std::uint32_t>(link::Space::Metadata), at, rec) != sizeof rec) break;
    std::uint32_t u = le32(rec);
    if (u == 0) break;
    vectors_[u] = le32(std::span(rec).subspan(4));
  }
  auto it = vectors_.find(uname);
  if (it == vectors_.end()) throw NubError(fmt::format("no module record for unit {:#010x}", uname));
  return it->second;
}

std::optional<ResolvedValue> Nub::resolve_value(const NubState& state, std::string_view name) {
  const auto* context = symbols_.find(state.context.uname);
  if (!context) throw NubError(fmt::format("no symbol table for unit {:#010x}", state.context.uname));
  auto all = symbols_.all();
  auto match = sym::lookup_name(name, *context, state.context.tail, all);
  if (!match) return std::nullopt;
  const sym::Symbol& s = *match->symbol;
  ResolvedValue v{match->module, &s, s.type, {}};
  if (s.is<sym::symbols::Typedef>()) throw NubError(fmt::format("{} names a type", s.id));
  if (const auto* ec = s.as<sym::symbols::EnumConst>()) {
    std::uint32_t bits = static_cast<std::uint32_t>(ec->value);
    for (int i = 0; i < 4; ++i) v.bytes.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xff));
    return v;
  }
  const sym::Type& t = match->module->unqualified(s.type);
  std::uint32_t address = 0;
  if (const auto* l = s.as<sym::symbols::Local>()) {
    address = state.fp + static_cast<std::uint32_t>(l->offset);
  } else if (const auto* p = s.as<sym::symbols::Param>()) {
    address = state.fp + static_cast<std::uint32_t>(p->offset);
  } else {
    std::uint32_t slot = vector_address(match->module->uname()) + 4 * s.address_index();
    std::byte word[4];
    if (fetch(static_cast<std::uint32_t>(link::Space::Metadata), slot, word) != 4) {
      throw NubError(fmt::format("address vector entry for {} is missing", s.id));
    }
    address = le32(word);
  }
  if (t.is<sym::types::Function>()) {
    for (int i = 0; i < 4; ++i) v.bytes.push_back(static_cast<std::byte>((address >> (8 * i)) & 0xff));
    return v;
  }
  v.bytes.resize(t.size);
  if (fetch(0, address, v.bytes) != t.size) throw NubError(fmt::format("cannot read {} at {:#x}", s.id, address));
  return v;
}

NubState Nub::startup_state(const StartupEvent& ev) {
  NubState s;
  s.fp = ev.tos;
  s.context.uname = ev.entry_uname;
  copy_name(s.name, "main");
  if (const auto* m = symbols_.find(ev.entry_uname)) {
    const auto& mod = m->module();
    // Before main runs, every file-scope symbol of the entry unit is visible.
    s.context.tail = mod.globals;
    if (mod.globals != sym::kNoUid) {
      for (const auto* sy : sym::visible_chain(*m, mod.globals)) {
        if (sy->id == "main" && sy->has_address_index()) {
          s.src = NubCoord::from(sy->src);
          break;
        }
      }
    }
  }
  return s;
}

void Nub::in_callback(const NubCallback& cb, const NubState& s) {
  stopped_ = true;
  struct Reset {
    bool& flag;
    ~Reset() { flag = false; }
  } reset{stopped_};
  if (cb) cb(s);
}

int Nub::init(NubCallback startup, NubCallback fault) {
  if (initialized_) throw NubError("the nub is already initialized");
  initialized_ = true;
  StartupEvent ev = link_.startup();
  tos_ = ev.tos;
  at_startup_ = true;
  in_callback(startup, startup_state(ev));
  at_startup_ = false;
  while (true) {
    Message e = request(Continue{});
    if (const auto* b = std::get_if<BreakEvent>(&e)) {
      tos_ = b->tos;
      auto it = breakpoints_.find(Key{b->uname, b->spoint});
      if (it == breakpoints_.end()) {
        ++dismissed_;
        continue;
      }
      ++delivered_;
      NubCallback handler = it->second;  // the handler may replace itself
      stopped_ = true;
      NubState s;
      frame(0, s);
      in_callback(handler, s);
    } else if (const auto* f = std::get_if<FaultEvent>(&e)) {
      tos_ = f->tos;
      last_fault_ = f->kind;
      NubState s;
      stopped_ = true;
      try {
        frame(0, s);
      } catch (const FrameRangeError&) {
        copy_name(s.name, "?");
      }
      in_callback(fault, s);
    } else if (const auto* x = std::get_if<ExitEvent>(&e)) {
      exit_code_ = x->code;
      return x->code;
    } else {
      throw ProtocolError(fmt::format("unexpected {} after CONTINUE", kind_name(e)));
    }
  }
}

}  // namespace cdb::nub
