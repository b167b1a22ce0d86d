#include "cdb/debugger/format.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "cdb/sym/errors.hpp"

namespace cdb::debugger {

namespace {

using namespace sym::types;

std::uint64_t load_le(std::span<const std::byte> b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < b.size() && i < 8; ++i) v |= std::to_integer<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::int64_t sign_extend(std::uint64_t v, std::size_t bytes) {
  if (bytes >= 8) return static_cast<std::int64_t>(v);
  unsigned bits = static_cast<unsigned>(bytes * 8);
  std::uint64_t sign = std::uint64_t{1} << (bits - 1);
  v &= (sign << 1) - 1;
  return static_cast<std::int64_t>((v ^ sign) - sign);
}

bool is_char(const sym::Type& t) { return (t.is<Int>() || t.is<Unsigned>()) && t.size == 1; }

std::string quoted(std::span<const std::byte> bytes) {
  std::string out = "\"";
  for (std::byte b : bytes) {
    auto c = std::to_integer<unsigned char>(b);
    if (c == 0) break;
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c >= 0x20 && c < 0x7f) out += static_cast<char>(c);
        else out += fmt::format("\\{:03o}", c);
    }
  }
  return out + "\"";
}

class Formatter {
 public:
  explicit Formatter(const sym::SymbolIndex& m) : m_(m) {}

  std::string value(sym::Uid type, std::span<const std::byte> bytes, int depth = 0) {
    if (depth > 64) throw FormatError("type nesting too deep");
    const sym::Type& t = m_.unqualified(type);
    if (t.is<Function>()) {
      if (bytes.size() != 4) throw FormatError("function value must be 4 bytes");
      return fmt::format("function at {:#010x}", load_le(bytes));
    }
    if (t.is<Void>()) throw FormatError("a void value cannot be displayed");
    if (bytes.size() != t.size) {
      throw FormatError(fmt::format("value has {} bytes but its type needs {}", bytes.size(), t.size));
    }
    if (t.is<Int>()) return fmt::format("{}", sign_extend(load_le(bytes), t.size));
    if (t.is<Unsigned>()) return fmt::format("{}", load_le(bytes));
    if (t.is<Float>()) {
      if (t.size == 4) return fmt::format("{}", std::bit_cast<float>(static_cast<std::uint32_t>(load_le(bytes))));
      if (t.size == 8) return fmt::format("{}", std::bit_cast<double>(load_le(bytes)));
      throw FormatError(fmt::format("unsupported float size {}", t.size));
    }
    if (t.is<Pointer>()) return fmt::format("{:#010x}", load_le(bytes));
    if (const auto* e = t.as<Enum>()) {
      auto v = static_cast<std::int32_t>(sign_extend(load_le(bytes), t.size));
      for (const auto& item : e->ids) {
        if (item.value == v) return item.id;
      }
      return fmt::format("{}", v);
    }
    if (const auto* a = t.as<Array>()) {
      const sym::Type& elem = m_.unqualified(a->type);
      std::string out = "{";
      for (std::uint32_t i = 0; i < a->nelems; ++i) {
        if (i) out += ", ";
        out += value(a->type, bytes.subspan(static_cast<std::size_t>(i) * elem.size, elem.size), depth + 1);
      }
      out += "}";
      if (is_char(elem)) out += " " + quoted(bytes);
      return out;
    }
    const std::vector<sym::Field>* fields = nullptr;
    if (const auto* s = t.as<Struct>()) fields = &s->fields;
    if (const auto* u = t.as<Union>()) fields = &u->fields;
    if (fields) {
      std::string out = "{";
      bool first = true;
      for (const auto& f : *fields) {
        if (!first) out += ", ";
        first = false;
        out += f.id + " = ";
        if (f.is_bitfield()) {
          if (f.offset < 0 || static_cast<std::size_t>(f.offset) + 4 > bytes.size()) {
            throw FormatError(fmt::format("bit-field {} lies outside its record", f.id));
          }
          bool is_signed = m_.unqualified(f.type).is<Int>();
          out += fmt::format("{}", extract_bitfield(bytes.subspan(f.offset, 4), f.bitsize, f.lsb, is_signed));
          continue;
        }
        const sym::Type& ft = m_.unqualified(f.type);
        if (f.offset < 0 || static_cast<std::size_t>(f.offset) + ft.size > bytes.size()) {
          throw FormatError(fmt::format("field {} lies outside its record", f.id));
        }
        out += value(f.type, bytes.subspan(f.offset, ft.size), depth + 1);
      }
      return out + "}";
    }
    throw FormatError("unsupported type");
  }

  std::string spelling(sym::Uid type, int depth = 0) {
    if (depth > 64) return "...";
    const sym::Type& t = m_.type_at(type);
    if (const auto* c = t.as<Const>()) return "const " + spelling(c->type, depth + 1);
    if (const auto* v = t.as<Volatile>()) return "volatile " + spelling(v->type, depth + 1);
    if (t.is<Int>()) return t.size == 1 ? "char" : t.size == 2 ? "short" : "int";
    if (t.is<Unsigned>()) return t.size == 1 ? "unsigned char" : t.size == 2 ? "unsigned short" : "unsigned";
    if (t.is<Float>()) return t.size == 4 ? "float" : "double";
    if (t.is<Void>()) return "void";
    if (const auto* p = t.as<Pointer>()) {
      std::string base = spelling(p->type, depth + 1);
      return base + (base.ends_with('*') ? "*" : " *");
    }
    if (const auto* e = t.as<Enum>()) return "enum " + e->tag;
    if (const auto* s = t.as<Struct>()) return "struct " + s->tag;
    if (const auto* u = t.as<Union>()) return "union " + u->tag;
    if (const auto* a = t.as<Array>()) return fmt::format("{} [{}]", spelling(a->type, depth + 1), a->nelems);
    if (const auto* f = t.as<Function>()) return spelling(f->type, depth + 1) + " ()";
    return "?";
  }

 private:
  const sym::SymbolIndex& m_;
};

}  // namespace

std::int64_t extract_bitfield(std::span<const std::byte> unit, std::uint32_t bitsize, std::uint32_t lsb, bool is_signed) {
  if (bitsize == 0 || bitsize > 32 || lsb + bitsize > 32 || unit.size() < 4) throw FormatError("bad bit-field layout");
  std::uint64_t word = load_le(unit.first(4));
  std::uint64_t v = (word >> lsb) & ((std::uint64_t{1} << bitsize) - 1);
  if (is_signed && (v >> (bitsize - 1)) & 1) return static_cast<std::int64_t>(v) - (std::int64_t{1} << bitsize);
  return static_cast<std::int64_t>(v);
}

std::string format_value(const sym::SymbolIndex& module, sym::Uid type, std::span<const std::byte> bytes) {
  try {
    return Formatter(module).value(type, bytes);
  } catch (const sym::LookupError& e) {
    throw FormatError(e.what());
  }
}

std::string type_spelling(const sym::SymbolIndex& module, sym::Uid type) {
  try {
    return Formatter(module).spelling(type);
  } catch (const sym::LookupError&) {
    return "?";
  }
}

}  // namespace cdb::debugger
