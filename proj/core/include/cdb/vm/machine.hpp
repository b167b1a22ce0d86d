#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cdb/link/image.hpp"

namespace cdb::vm {

enum class FaultKind : std::uint8_t { DivideByZero = 1, MemoryAccess = 2, BadCallTarget = 3 };
const char* to_string(FaultKind k);

// Loaded, main not yet entered.
struct Startup {
  friend bool operator==(const Startup&, const Startup&) = default;
};
struct StoppedAt {
  std::uint32_t spoint = 0;
  std::uint32_t uname = 0;
  friend bool operator==(const StoppedAt&, const StoppedAt&) = default;
};
struct Faulted {
  FaultKind kind = FaultKind::MemoryAccess;
  std::int32_t spoint = -1;  // ip of the faulting frame; -1 when uninstrumented
  std::uint32_t uname = 0;
  friend bool operator==(const Faulted&, const Faulted&) = default;
};
struct Exited {
  std::int32_t code = 0;
  friend bool operator==(const Exited&, const Exited&) = default;
};
using RunStatus = std::variant<Startup, StoppedAt, Faulted, Exited>;

std::string describe(const RunStatus& s);

// Misuse of the run-control or address-space interface.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct MachineOptions {
  std::istream* input = nullptr;   // getchar; null reads as end of file
  std::ostream* output = nullptr;  // putchar/print_int; null discards
  std::vector<std::string> args;   // argv[0..], passed to main(argc, argv)
  std::uint32_t memory_size = 4u << 20;
};

// Interpreter for a linked image. Memory is one little-endian space from 0
// to memory_size; data is loaded at kDataBase and the stack grows down from
// below the argument block at the top.
class Machine {
 public:
  Machine(link::ExecutableImage image, MachineOptions options);

  const RunStatus& status() const { return status_; }
  // Runs to the next trap, fault, or exit. After a fault the program is
  // terminated with exit code 128 + kind.
  const RunStatus& resume();

  // Debugger access. Short counts at the end of a space; unknown spaces and
  // stores to the metadata space throw UsageError.
  std::size_t fetch(std::uint32_t space, std::uint32_t address, std::span<std::byte> out) const;
  std::size_t store(std::uint32_t space, std::uint32_t address, std::span<const std::byte> in);

  std::uint32_t tos() const;
  const link::ExecutableImage& image() const { return image_; }
  std::uint64_t steps() const { return steps_; }

 private:
  struct Frame {
    std::uint32_t function = 0;
    std::size_t pc = 0;
    std::uint32_t fp = 0;
    std::uint32_t saved_sp = 0;
  };

  void enter_main();
  void run();
  bool call(std::uint32_t function, std::size_t nargs);
  void fault(FaultKind kind);
  bool mem_ok(std::uint32_t addr, std::uint32_t n) const;
  std::uint32_t read_u32(std::uint32_t addr) const;
  void write_u32(std::uint32_t addr, std::uint32_t v);

  link::ExecutableImage image_;
  MachineOptions options_;
  std::vector<std::byte> memory_;
  std::vector<std::byte> flags_;
  std::vector<std::uint64_t> stack_;
  std::vector<Frame> frames_;
  std::uint32_t sp_ = 0;
  std::uint32_t stack_limit_ = 0;
  RunStatus status_ = Startup{};
  std::uint64_t steps_ = 0;
};

}  // namespace cdb::vm
