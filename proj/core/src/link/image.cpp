#include "cdb/link/image.hpp"

#include <cstring>

namespace cdb::link {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'N', 'I', 'N', 'X', 'E', '1'};

}  // namespace

const ImageUnit* ExecutableImage::unit(std::uint32_t uname) const {
  for (const ImageUnit& u : units) {
    if (u.uname == uname) return &u;
  }
  return nullptr;
}

std::map<std::uint32_t, std::string> ExecutableImage::manifest() const {
  std::map<std::uint32_t, std::string> m;
  for (const ImageUnit& u : units) m[u.uname] = u.symfile;
  return m;
}

Bytes write_image(const ExecutableImage& image) {
  ByteWriter w;
  w.put_bytes(as_bytes(std::string_view(kMagic, sizeof kMagic)));
  w.put_uleb(image.functions.size());
  for (const ImageFunction& f : image.functions) {
    w.put_string(f.name);
    w.put_u32le(f.uname);
    w.put_uleb(f.frame_size);
    w.put_uleb(f.params.size());
    for (const auto& p : f.params) {
      w.put_uleb(p.offset);
      w.put_u8(static_cast<std::uint8_t>(p.mem));
    }
    w.put_u8(f.returns_value ? 1 : 0);
    codegen::put_code(w, f.code);
  }
  w.put_uleb(image.data.size());
  w.put_bytes(image.data);
  w.put_uleb(image.metadata.size());
  w.put_bytes(image.metadata);
  w.put_uleb(image.bpflags_size);
  w.put_u32le(image.tos_address);
  w.put_u32le(image.sentinel_address);
  w.put_uleb(image.entry);
  w.put_uleb(image.units.size());
  for (const ImageUnit& u : image.units) {
    w.put_u32le(u.uname);
    w.put_string(u.source_file);
    w.put_string(u.symfile);
    w.put_uleb(u.spoint_count);
    w.put_uleb(u.record_address);
    w.put_u32le(u.data_address);
    w.put_u8(u.instrumented ? 1 : 0);
  }
  Bytes out = w.take();
  ByteWriter(out).put_u32le(crc32(out));
  return out;
}

ExecutableImage read_image(std::span<const std::byte> bytes) {
  if (bytes.size() < sizeof kMagic + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ImageFormatError("not an executable image");
  }
  auto body = bytes.first(bytes.size() - 4);
  if (ByteReader(bytes.last(4)).get_u32le() != crc32(body)) throw ImageFormatError("image checksum mismatch");
  try {
    ByteReader r(body);
    r.get_bytes(sizeof kMagic);
    ExecutableImage image;
    std::uint64_t nfun = r.get_uleb();
    for (std::uint64_t i = 0; i < nfun; ++i) {
      ImageFunction f;
      f.name = r.get_string();
      f.uname = r.get_u32le();
      f.frame_size = r.get_uleb32();
      std::uint64_t np = r.get_uleb();
      for (std::uint64_t k = 0; k < np; ++k) {
        codegen::ParamSlot p;
        p.offset = r.get_uleb32();
        std::uint8_t m = r.get_u8();
        if (m > static_cast<std::uint8_t>(codegen::Mem::F64)) throw ImageFormatError("bad parameter width");
        p.mem = static_cast<codegen::Mem>(m);
        f.params.push_back(p);
      }
      f.returns_value = r.get_u8() != 0;
      f.code = codegen::get_code(r);
      image.functions.push_back(std::move(f));
    }
    auto data = r.get_bytes(r.get_uleb());
    image.data.assign(data.begin(), data.end());
    auto meta = r.get_bytes(r.get_uleb());
    image.metadata.assign(meta.begin(), meta.end());
    image.bpflags_size = r.get_uleb32();
    image.tos_address = r.get_u32le();
    image.sentinel_address = r.get_u32le();
    image.entry = r.get_uleb32();
    if (image.entry >= image.functions.size()) throw ImageFormatError("entry function out of range");
    std::uint64_t nunits = r.get_uleb();
    for (std::uint64_t i = 0; i < nunits; ++i) {
      ImageUnit u;
      u.uname = r.get_u32le();
      u.source_file = r.get_string();
      u.symfile = r.get_string();
      u.spoint_count = r.get_uleb32();
      u.record_address = r.get_uleb32();
      u.data_address = r.get_u32le();
      u.instrumented = r.get_u8() != 0;
      image.units.push_back(std::move(u));
    }
    if (!r.at_end()) throw ImageFormatError("trailing bytes in image");
    return image;
  } catch (const TruncatedInput&) {
    throw ImageFormatError("truncated image");
  } catch (const MalformedInput& e) {
    throw ImageFormatError(e.what());
  } catch (const codegen::ObjectFormatError& e) {
    throw ImageFormatError(e.what());
  }
}

ExecutableImage load_image(const std::string& path) { return read_image(read_file(path)); }

}  // namespace cdb::link
