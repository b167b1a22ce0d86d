#include "cdb/codegen/isa.hpp"

#include <bit>

#include <fmt/format.h>

namespace cdb::codegen {

const char* to_string(Op op) {
  switch (op) {
    case Op::Nop: return "nop";
    case Op::PushI: return "pushi";
    case Op::PushF: return "pushf";
    case Op::AddrLocal: return "addrl";
    case Op::AddrGlobal: return "addrg";
    case Op::Load: return "load";
    case Op::Store: return "store";
    case Op::Copy: return "copy";
    case Op::Zero: return "zero";
    case Op::BfLoad: return "bfload";
    case Op::BfStore: return "bfstore";
    case Op::Dup: return "dup";
    case Op::Pop: return "pop";
    case Op::Swap: return "swap";
    case Op::Over: return "over";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::Shl: return "shl";
    case Op::Shr: return "shr";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Neg: return "neg";
    case Op::BitNot: return "bitnot";
    case Op::Eq: return "eq";
    case Op::Ne: return "ne";
    case Op::Lt: return "lt";
    case Op::Le: return "le";
    case Op::Gt: return "gt";
    case Op::Ge: return "ge";
    case Op::LNot: return "lnot";
    case Op::Cvt: return "cvt";
    case Op::Jmp: return "jmp";
    case Op::Jz: return "jz";
    case Op::Jnz: return "jnz";
    case Op::Call: return "call";
    case Op::CallB: return "callb";
    case Op::Ret: return "ret";
    case Op::BpCheck: return "bpcheck";
  }
  return "?";
}

std::string to_string(const Instr& i) {
  switch (i.op) {
    case Op::PushF:
      return fmt::format("{} {}", to_string(i.op), std::bit_cast<double>(i.b));
    case Op::PushI:
      return fmt::format("{} {}", to_string(i.op), i.b);
    case Op::Nop: case Op::Dup: case Op::Pop: case Op::Swap: case Op::Over:
      return to_string(i.op);
    default:
      return i.b ? fmt::format("{} {}, {}", to_string(i.op), i.a, i.b) : fmt::format("{} {}", to_string(i.op), i.a);
  }
}

}  // namespace cdb::codegen
