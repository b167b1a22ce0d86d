#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdb/codegen/object.hpp"

namespace cdb::link {

// Address-space tags understood by the target.
enum class Space : std::uint32_t { Memory = 0, BreakpointFlags = 1, Metadata = 2 };

inline constexpr std::uint32_t kDataBase = 0x1000;
inline constexpr std::uint32_t kCodeBase = 0x80000000u;
inline constexpr std::uint32_t kModuleRecordSize = 8;

struct ImageFunction {
  std::string name;
  std::uint32_t uname = 0;  // owning unit
  std::uint32_t frame_size = 0;
  std::vector<codegen::ParamSlot> params;
  bool returns_value = false;
  std::vector<codegen::Instr> code;  // Call targets are image function indices
  friend bool operator==(const ImageFunction&, const ImageFunction&) = default;
};

struct ImageUnit {
  std::uint32_t uname = 0;
  std::string source_file;
  std::string symfile;  // path relative to the image's directory
  std::uint32_t spoint_count = 0;
  std::uint32_t record_address = 0;  // in the metadata space
  std::uint32_t data_address = 0;    // start of the unit's data in memory
  bool instrumented = true;
  friend bool operator==(const ImageUnit&, const ImageUnit&) = default;
};

// Linked program. The metadata space holds _Nub_modules: the module records
// {uname, vector address} back to back from offset 0, closed by an all-zero
// record, followed by the address vectors.
struct ExecutableImage {
  std::vector<ImageFunction> functions;
  Bytes data;  // loaded at kDataBase
  Bytes metadata;
  std::uint32_t bpflags_size = 0;
  std::uint32_t tos_address = 0;       // the word _Nub_tos
  std::uint32_t sentinel_address = 0;  // base shadow frame
  std::uint32_t entry = 0;             // function index of main
  std::vector<ImageUnit> units;        // link order
  friend bool operator==(const ExecutableImage&, const ExecutableImage&) = default;

  const ImageUnit* unit(std::uint32_t uname) const;
  // uname -> symfile path, relative to the image.
  std::map<std::uint32_t, std::string> manifest() const;
};

class ImageFormatError : public Error {
 public:
  using Error::Error;
};

Bytes write_image(const ExecutableImage& image);
ExecutableImage read_image(std::span<const std::byte> bytes);
ExecutableImage load_image(const std::string& path);

inline std::uint32_t function_address(std::uint32_t index) { return kCodeBase + index; }

}  // namespace cdb::link
