#pragma once

// Stack-machine instruction set shared by the code generator, the linker,
// and the VM. Operand-stack slots are 64 bits wide; integers are kept
// normalized to their C type (sign- or zero-extended), floating values are
// doubles (float values rounded to single precision).

#include <cstdint>
#include <string>

namespace cdb::codegen {

// Memory access width and interpretation.
enum class Mem : std::uint8_t { I8, U8, I16, U16, I32, U32, F32, F64 };

// Arithmetic flavor for operators.
enum class Arith : std::uint8_t { I32, U32, F32, F64 };

enum class Builtin : std::uint8_t { Getchar = 1, Putchar = 2, PrintInt = 3 };

enum class Op : std::uint8_t {
  Nop,
  PushI,       // b = value
  PushF,       // b = bits of a double
  AddrLocal,   // push fp + a
  AddrGlobal,  // push address of object symbol a, plus b (object files only)
  Load,        // a = Mem; [addr] -> [value]
  Store,       // a = Mem; [addr, value] -> [stored value]
  Copy,        // a = size; [dst, src] -> [dst]
  Zero,        // a = size; [dst] -> []
  BfLoad,      // a = bitsize, b = lsb | signed << 8; [addr] -> [value]
  BfStore,     // same operands; [addr, value] -> [stored value]
  Dup,
  Pop,
  Swap,
  Over,        // [x, y] -> [x, y, x]
  Add, Sub, Mul, Div, Mod, Shl, Shr, And, Or, Xor,  // a = Arith
  Neg, BitNot,                                      // a = Arith
  Eq, Ne, Lt, Le, Gt, Ge,                           // a = Arith; push 0 or 1
  LNot,        // a = Arith; push 1 if zero
  Cvt,         // a = from Mem, b = to Mem
  Jmp,         // a = target pc
  Jz,          // a = target pc, b = Arith of the tested value
  Jnz,
  Call,        // a = function (object symbol in objects, function index in images), b = argument count
  CallB,       // a = Builtin
  Ret,         // a = 1 if a value is returned
  BpCheck,     // a = stopping point; trap if breakpoint flag a is set
};

struct Instr {
  Op op = Op::Nop;
  std::int32_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const Instr&, const Instr&) = default;
};

const char* to_string(Op op);
std::string to_string(const Instr& i);

inline constexpr std::uint32_t mem_size(Mem m) {
  switch (m) {
    case Mem::I8: case Mem::U8: return 1;
    case Mem::I16: case Mem::U16: return 2;
    case Mem::I32: case Mem::U32: case Mem::F32: return 4;
    case Mem::F64: return 8;
  }
  return 0;
}

// Shadow frame layout, in bytes from the frame base.
inline constexpr std::uint32_t kFrameUp = 0;
inline constexpr std::uint32_t kFrameDown = 4;
inline constexpr std::uint32_t kFrameFunc = 8;
inline constexpr std::uint32_t kFrameModule = 12;
inline constexpr std::uint32_t kFrameIp = 16;
inline constexpr std::uint32_t kFrameHeaderSize = 20;

// Name of the linker-defined word holding the top shadow frame's address.
inline constexpr const char* kNubTos = "_Nub_tos";

}  // namespace cdb::codegen
