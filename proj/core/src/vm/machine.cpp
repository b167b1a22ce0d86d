#include "cdb/vm/machine.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace cdb::vm {

using codegen::Arith;
using codegen::Instr;
using codegen::Mem;
using codegen::Op;

const char* to_string(FaultKind k) {
  switch (k) {
    case FaultKind::DivideByZero: return "divide by zero";
    case FaultKind::MemoryAccess: return "memory access";
    case FaultKind::BadCallTarget: return "bad call target";
  }
  return "unknown fault";
}

std::string describe(const RunStatus& s) {
  struct {
    std::string operator()(const Startup&) const { return "startup"; }
    std::string operator()(const StoppedAt& v) const { return fmt::format("stopped at {} in {:#010x}", v.spoint, v.uname); }
    std::string operator()(const Faulted& v) const {
      return fmt::format("faulted ({}) at {} in {:#010x}", to_string(v.kind), v.spoint, v.uname);
    }
    std::string operator()(const Exited& v) const { return fmt::format("exited with code {}", v.code); }
  } visitor;
  return std::visit(visitor, s);
}

namespace {

std::int64_t norm_int(Mem m, std::int64_t v) {
  switch (m) {
    case Mem::I8: return static_cast<std::int8_t>(v);
    case Mem::U8: return static_cast<std::uint8_t>(v);
    case Mem::I16: return static_cast<std::int16_t>(v);
    case Mem::U16: return static_cast<std::uint16_t>(v);
    case Mem::I32: return static_cast<std::int32_t>(v);
    case Mem::U32: return static_cast<std::uint32_t>(v);
    default: return v;
  }
}

bool is_float(Mem m) { return m == Mem::F32 || m == Mem::F64; }

double as_f(std::uint64_t v) { return std::bit_cast<double>(v); }
std::uint64_t from_f(double d) { return std::bit_cast<std::uint64_t>(d); }
std::uint64_t from_i(std::int64_t i) { return static_cast<std::uint64_t>(i); }
std::int64_t as_i(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::uint64_t normalize(Mem m, std::uint64_t v) {
  if (m == Mem::F32) return from_f(static_cast<float>(as_f(v)));
  if (m == Mem::F64) return v;
  return from_i(norm_int(m, as_i(v)));
}

std::uint64_t normalize(Arith a, std::uint64_t v) {
  switch (a) {
    case Arith::I32: return from_i(static_cast<std::int32_t>(as_i(v)));
    case Arith::U32: return from_i(static_cast<std::uint32_t>(as_i(v)));
    case Arith::F32: return from_f(static_cast<float>(as_f(v)));
    case Arith::F64: return v;
  }
  return v;
}

bool is_float(Arith a) { return a == Arith::F32 || a == Arith::F64; }

std::int64_t float_to_int(double d) {
  if (std::isnan(d) || d >= 9.2e18 || d <= -9.2e18) return 0;
  return static_cast<std::int64_t>(d);
}

}  // namespace

Machine::Machine(link::ExecutableImage image, MachineOptions options)
    : image_(std::move(image)), options_(std::move(options)) {
  std::uint32_t data_end = link::kDataBase + static_cast<std::uint32_t>(image_.data.size());
  if (options_.memory_size < data_end + 4096) throw UsageError("memory too small for image");
  memory_.assign(options_.memory_size, std::byte{0});
  std::copy(image_.data.begin(), image_.data.end(), memory_.begin() + link::kDataBase);
  flags_.assign(image_.bpflags_size, std::byte{0});
  stack_limit_ = (data_end + 7) / 8 * 8;

  // Argument block at the top of memory: strings, then the argv array.
  std::uint32_t top = options_.memory_size;
  std::vector<std::uint32_t> argv;
  for (const std::string& a : options_.args) {
    top -= static_cast<std::uint32_t>(a.size() + 1);
    std::memcpy(memory_.data() + top, a.data(), a.size());
    argv.push_back(top);
  }
  top &= ~7u;
  top -= static_cast<std::uint32_t>(4 * (argv.size() + 1));
  top &= ~7u;
  for (std::size_t i = 0; i < argv.size(); ++i) write_u32(top + static_cast<std::uint32_t>(4 * i), argv[i]);
  write_u32(top + static_cast<std::uint32_t>(4 * argv.size()), 0);
  sp_ = top;
  if (sp_ <= stack_limit_) throw UsageError("memory too small for arguments");
}

bool Machine::mem_ok(std::uint32_t addr, std::uint32_t n) const {
  return addr >= link::kDataBase && static_cast<std::uint64_t>(addr) + n <= memory_.size();
}

std::uint32_t Machine::read_u32(std::uint32_t addr) const {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(memory_[addr + i]) << (8 * i);
  return v;
}

void Machine::write_u32(std::uint32_t addr, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) memory_[addr + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

std::uint32_t Machine::tos() const { return read_u32(image_.tos_address); }

std::size_t Machine::fetch(std::uint32_t space, std::uint32_t address, std::span<std::byte> out) const {
  const std::vector<std::byte>* bytes = nullptr;
  switch (static_cast<link::Space>(space)) {
    case link::Space::Memory: bytes = &memory_; break;
    case link::Space::BreakpointFlags: bytes = &flags_; break;
    case link::Space::Metadata: bytes = &image_.metadata; break;
    default: throw UsageError(fmt::format("unknown address space {}", space));
  }
  if (address >= bytes->size()) return 0;
  std::size_t n = std::min(out.size(), bytes->size() - address);
  std::memcpy(out.data(), bytes->data() + address, n);
  return n;
}

std::size_t Machine::store(std::uint32_t space, std::uint32_t address, std::span<const std::byte> in) {
  std::vector<std::byte>* bytes = nullptr;
  switch (static_cast<link::Space>(space)) {
    case link::Space::Memory: bytes = &memory_; break;
    case link::Space::BreakpointFlags: bytes = &flags_; break;
    case link::Space::Metadata: throw UsageError("address space 2 is read-only");
    default: throw UsageError(fmt::format("unknown address space {}", space));
  }
  if (address >= bytes->size()) return 0;
  std::size_t n = std::min(in.size(), bytes->size() - address);
  std::memcpy(bytes->data() + address, in.data(), n);
  return n;
}

const RunStatus& Machine::resume() {
  if (std::holds_alternative<Exited>(status_)) throw UsageError("the program has exited");
  if (const auto* f = std::get_if<Faulted>(&status_)) {
    frames_.clear();
    stack_.clear();
    status_ = Exited{128 + static_cast<std::int32_t>(f->kind)};
    return status_;
  }
  if (std::holds_alternative<Startup>(status_)) enter_main();
  if (std::holds_alternative<Startup>(status_) || std::holds_alternative<StoppedAt>(status_)) run();
  return status_;
}

void Machine::enter_main() {
  const auto& main_fn = image_.functions.at(image_.entry);
  std::size_t nargs = 0;
  if (!main_fn.params.empty()) {
    stack_.push_back(from_i(static_cast<std::int64_t>(options_.args.size())));
    stack_.push_back(from_i(static_cast<std::int64_t>(sp_)));
    nargs = 2;
    for (std::size_t i = 2; i < main_fn.params.size(); ++i, ++nargs) stack_.push_back(0);
  }
  if (!call(image_.entry, nargs)) return;
  status_ = StoppedAt{};  // running; replaced by the next stop
}

void Machine::fault(FaultKind kind) {
  Faulted f{kind, -1, 0};
  if (!frames_.empty()) {
    const Frame& top = frames_.back();
    const auto& fn = image_.functions[top.function];
    f.uname = fn.uname;
    const link::ImageUnit* unit = image_.unit(fn.uname);
    if (unit && unit->instrumented) f.spoint = static_cast<std::int32_t>(read_u32(top.fp + codegen::kFrameIp));
  }
  status_ = f;
}

bool Machine::call(std::uint32_t function, std::size_t nargs) {
  if (function >= image_.functions.size() || stack_.size() < nargs) {
    fault(FaultKind::BadCallTarget);
    return false;
  }
  const auto& fn = image_.functions[function];
  std::uint32_t size = (fn.frame_size + 7) & ~7u;
  if (sp_ < stack_limit_ + size) {
    fault(FaultKind::MemoryAccess);
    return false;
  }
  std::uint32_t fp = sp_ - size;
  std::memset(memory_.data() + fp, 0, size);
  std::size_t base = stack_.size() - nargs;
  for (std::size_t i = 0; i < fn.params.size() && i < nargs; ++i) {
    const auto& p = fn.params[i];
    std::uint64_t v = normalize(p.mem, stack_[base + i]);
    std::uint32_t at = fp + p.offset;
    if (p.mem == Mem::F32) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(as_f(v)));
      write_u32(at, bits);
    } else {
      std::uint32_t n = codegen::mem_size(p.mem);
      for (std::uint32_t k = 0; k < n; ++k) memory_[at + k] = static_cast<std::byte>((v >> (8 * k)) & 0xff);
    }
  }
  stack_.resize(base);
  frames_.push_back({function, 0, fp, sp_});
  sp_ = fp;
  return true;
}

void Machine::run() {
  while (true) {
    Frame& fr = frames_.back();
    const auto& fn = image_.functions[fr.function];
    if (fr.pc >= fn.code.size()) {
      fault(FaultKind::BadCallTarget);
      return;
    }
    const Instr& in = fn.code[fr.pc++];
    ++steps_;
    auto pop = [&] {
      std::uint64_t v = stack_.back();
      stack_.pop_back();
      return v;
    };
    auto arith = [&] { return static_cast<Arith>(in.a); };

    switch (in.op) {
      case Op::Nop:
        break;
      case Op::PushI:
      case Op::PushF:
        stack_.push_back(static_cast<std::uint64_t>(in.b));
        break;
      case Op::AddrLocal:
        stack_.push_back(fr.fp + static_cast<std::uint32_t>(in.a));
        break;
      case Op::AddrGlobal:
        fault(FaultKind::BadCallTarget);
        return;
      case Op::Load: {
        auto m = static_cast<Mem>(in.a);
        auto addr = static_cast<std::uint32_t>(pop());
        std::uint32_t n = codegen::mem_size(m);
        if (!mem_ok(addr, n)) return fault(FaultKind::MemoryAccess);
        std::uint64_t raw = 0;
        for (std::uint32_t k = 0; k < n; ++k) raw |= std::to_integer<std::uint64_t>(memory_[addr + k]) << (8 * k);
        if (m == Mem::F32) stack_.push_back(from_f(std::bit_cast<float>(static_cast<std::uint32_t>(raw))));
        else if (m == Mem::F64) stack_.push_back(raw);
        else stack_.push_back(normalize(m, raw));
        break;
      }
      case Op::Store: {
        auto m = static_cast<Mem>(in.a);
        std::uint64_t v = normalize(m, pop());
        auto addr = static_cast<std::uint32_t>(pop());
        std::uint32_t n = codegen::mem_size(m);
        if (!mem_ok(addr, n)) return fault(FaultKind::MemoryAccess);
        std::uint64_t raw = m == Mem::F32 ? std::bit_cast<std::uint32_t>(static_cast<float>(as_f(v))) : v;
        for (std::uint32_t k = 0; k < n; ++k) memory_[addr + k] = static_cast<std::byte>((raw >> (8 * k)) & 0xff);
        stack_.push_back(v);
        break;
      }
      case Op::Copy: {
        auto src = static_cast<std::uint32_t>(pop());
        auto dst = static_cast<std::uint32_t>(pop());
        auto n = static_cast<std::uint32_t>(in.a);
        if (!mem_ok(src, n) || !mem_ok(dst, n)) return fault(FaultKind::MemoryAccess);
        std::memmove(memory_.data() + dst, memory_.data() + src, n);
        stack_.push_back(dst);
        break;
      }
      case Op::Zero: {
        auto dst = static_cast<std::uint32_t>(pop());
        auto n = static_cast<std::uint32_t>(in.a);
        if (!mem_ok(dst, n)) return fault(FaultKind::MemoryAccess);
        std::memset(memory_.data() + dst, 0, n);
        break;
      }
      case Op::BfLoad:
      case Op::BfStore: {
        auto bits = static_cast<std::uint32_t>(in.a);
        auto lsb = static_cast<std::uint32_t>(in.b & 0xff);
        bool is_signed = (in.b & 0x100) != 0;
        std::uint32_t mask = bits >= 32 ? 0xffffffffu : ((1u << bits) - 1);
        std::uint64_t value = in.op == Op::BfStore ? pop() : 0;
        auto addr = static_cast<std::uint32_t>(pop());
        if (!mem_ok(addr, 4)) return fault(FaultKind::MemoryAccess);
        std::uint32_t unit = read_u32(addr);
        std::uint32_t field;
        if (in.op == Op::BfStore) {
          field = static_cast<std::uint32_t>(value) & mask;
          write_u32(addr, (unit & ~(mask << lsb)) | (field << lsb));
        } else {
          field = (unit >> lsb) & mask;
        }
        std::int64_t result = field;
        if (is_signed && bits < 32 && (field >> (bits - 1)) & 1) result -= std::int64_t{1} << bits;
        if (is_signed && bits == 32) result = static_cast<std::int32_t>(field);
        stack_.push_back(from_i(result));
        break;
      }
      case Op::Dup:
        stack_.push_back(stack_.back());
        break;
      case Op::Pop:
        stack_.pop_back();
        break;
      case Op::Swap:
        std::swap(stack_[stack_.size() - 1], stack_[stack_.size() - 2]);
        break;
      case Op::Over:
        stack_.push_back(stack_[stack_.size() - 2]);
        break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod:
      case Op::Shl: case Op::Shr: case Op::And: case Op::Or: case Op::Xor: {
        Arith a = arith();
        std::uint64_t r = pop(), l = pop();
        std::uint64_t out = 0;
        if (is_float(a)) {
          double x = as_f(l), y = as_f(r), z = 0;
          switch (in.op) {
            case Op::Add: z = x + y; break;
            case Op::Sub: z = x - y; break;
            case Op::Mul: z = x * y; break;
            case Op::Div: z = x / y; break;
            default: return fault(FaultKind::BadCallTarget);
          }
          out = from_f(z);
        } else {
          bool u = a == Arith::U32;
          std::int64_t x = as_i(l), y = as_i(r);
          if ((in.op == Op::Div || in.op == Op::Mod) && y == 0) return fault(FaultKind::DivideByZero);
          std::int64_t z = 0;
          switch (in.op) {
            case Op::Add: z = x + y; break;
            case Op::Sub: z = x - y; break;
            case Op::Mul: z = static_cast<std::int64_t>(static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y)); break;
            case Op::Div: z = u ? static_cast<std::int64_t>(static_cast<std::uint32_t>(x) / static_cast<std::uint32_t>(y)) : x / y; break;
            case Op::Mod: z = u ? static_cast<std::int64_t>(static_cast<std::uint32_t>(x) % static_cast<std::uint32_t>(y)) : x % y; break;
            case Op::Shl: z = static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << (y & 31)); break;
            case Op::Shr:
              z = u ? static_cast<std::int64_t>(static_cast<std::uint32_t>(x) >> (y & 31))
                    : static_cast<std::int64_t>(static_cast<std::int32_t>(x) >> (y & 31));
              break;
            case Op::And: z = x & y; break;
            case Op::Or: z = x | y; break;
            case Op::Xor: z = x ^ y; break;
            default: break;
          }
          out = from_i(z);
        }
        stack_.push_back(normalize(a, out));
        break;
      }
      case Op::Neg: {
        Arith a = arith();
        std::uint64_t v = pop();
        stack_.push_back(normalize(a, is_float(a) ? from_f(-as_f(v)) : from_i(-as_i(v))));
        break;
      }
      case Op::BitNot:
        stack_.push_back(normalize(arith(), from_i(~as_i(pop()))));
        break;
      case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: {
        Arith a = arith();
        std::uint64_t r = pop(), l = pop();
        int c;  // -1, 0, 1, or 2 for unordered
        if (is_float(a)) {
          double x = as_f(l), y = as_f(r);
          c = x < y ? -1 : x > y ? 1 : x == y ? 0 : 2;
        } else {
          std::int64_t x = as_i(l), y = as_i(r);
          if (a == Arith::U32) {
            x = static_cast<std::uint32_t>(x);
            y = static_cast<std::uint32_t>(y);
          }
          c = x < y ? -1 : x > y ? 1 : 0;
        }
        bool t = false;
        switch (in.op) {
          case Op::Eq: t = c == 0; break;
          case Op::Ne: t = c != 0; break;
          case Op::Lt: t = c == -1; break;
          case Op::Le: t = c == -1 || c == 0; break;
          case Op::Gt: t = c == 1; break;
          case Op::Ge: t = c == 1 || c == 0; break;
          default: break;
        }
        stack_.push_back(t ? 1 : 0);
        break;
      }
      case Op::LNot: {
        std::uint64_t v = pop();
        bool zero = is_float(arith()) ? as_f(v) == 0.0 : v == 0;
        stack_.push_back(zero ? 1 : 0);
        break;
      }
      case Op::Cvt: {
        auto from = static_cast<Mem>(in.a);
        auto to = static_cast<Mem>(in.b);
        std::uint64_t v = pop();
        if (is_float(to)) {
          double d = is_float(from) ? as_f(v) : static_cast<double>(as_i(v));
          stack_.push_back(normalize(to, from_f(d)));
        } else {
          std::int64_t i = is_float(from) ? float_to_int(as_f(v)) : as_i(v);
          stack_.push_back(from_i(norm_int(to, i)));
        }
        break;
      }
      case Op::Jmp:
        fr.pc = static_cast<std::size_t>(in.a);
        break;
      case Op::Jz:
      case Op::Jnz: {
        std::uint64_t v = pop();
        bool zero = is_float(static_cast<Arith>(in.b)) ? as_f(v) == 0.0 : v == 0;
        if (zero == (in.op == Op::Jz)) fr.pc = static_cast<std::size_t>(in.a);
        break;
      }
      case Op::Call:
        if (!call(static_cast<std::uint32_t>(in.a), static_cast<std::size_t>(in.b))) return;
        break;
      case Op::CallB:
        switch (static_cast<codegen::Builtin>(in.a)) {
          case codegen::Builtin::Getchar: {
            int c = -1;
            if (options_.input) {
              int g = options_.input->get();
              c = g == std::char_traits<char>::eof() ? -1 : static_cast<unsigned char>(g);
            }
            stack_.push_back(from_i(c));
            break;
          }
          case codegen::Builtin::Putchar: {
            auto c = static_cast<unsigned char>(as_i(pop()));
            if (options_.output) options_.output->put(static_cast<char>(c));
            stack_.push_back(c);
            break;
          }
          case codegen::Builtin::PrintInt: {
            auto v = static_cast<std::int32_t>(as_i(pop()));
            if (options_.output) *options_.output << v;
            break;
          }
          default:
            return fault(FaultKind::BadCallTarget);
        }
        break;
      case Op::Ret: {
        std::uint64_t v = in.a ? pop() : 0;
        sp_ = fr.saved_sp;
        frames_.pop_back();
        if (frames_.empty()) {
          if (options_.output) options_.output->flush();
          status_ = Exited{static_cast<std::int32_t>(as_i(v))};
          return;
        }
        if (in.a) stack_.push_back(v);
        break;
      }
      case Op::BpCheck: {
        auto n = static_cast<std::uint32_t>(in.a);
        if (n < flags_.size() && flags_[n] != std::byte{0}) {
          write_u32(fr.fp + codegen::kFrameIp, n);
          if (options_.output) options_.output->flush();
          status_ = StoppedAt{n, fn.uname};
          return;
        }
        break;
      }
    }
  }
}

}  // namespace cdb::vm
