#include "cdb/sym/pickle.hpp"

#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>

#include "cdb/sym/validate.hpp"

namespace cdb::sym {

const char* to_string(ByteCategory c) {
  switch (c) {
    case ByteCategory::identifiers: return "identifiers and file names";
    case ByteCategory::symbols: return "symbols";
    case ByteCategory::types: return "types";
    case ByteCategory::coordinates: return "source coordinates";
    case ByteCategory::module_records: return "module records";
    case ByteCategory::address_vectors: return "address vectors";
    case ByteCategory::breakpoint_flags: return "breakpoint flags";
  }
  return "?";
}

namespace {

// Attributes the bytes written since the last switch to the category that
// was current while they were written.
class Tally {
 public:
  Tally(ByteWriter& w, ByteAccounting* acc) : w_(w), acc_(acc) {}

  ByteCategory switch_to(ByteCategory next) {
    flush();
    auto prev = current_;
    current_ = next;
    return prev;
  }

  void flush() {
    if (acc_) acc_->add(current_, w_.size() - mark_);
    mark_ = w_.size();
  }

 private:
  ByteWriter& w_;
  ByteAccounting* acc_;
  ByteCategory current_ = ByteCategory::module_records;
  std::size_t mark_ = 0;
};

class Scope {
 public:
  Scope(Tally& t, ByteCategory c) : t_(t), prev_(t.switch_to(c)) {}
  ~Scope() { t_.switch_to(prev_); }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  Tally& t_;
  ByteCategory prev_;
};

template <typename Variant>
std::uint64_t tag_of(const Variant& v) {
  return v.index() + 1;
}

class Writer {
 public:
  Writer(ByteWriter& w, ByteAccounting* acc) : w_(w), tally_(w, acc) {}

  void module(const Module& m) {
    w_.put_bytes(as_bytes(kPickleMagic));
    w_.put_string(m.file);
    w_.put_uleb(m.uname);
    w_.put_uleb(m.nuids);
    w_.put_uleb(m.items.size());
    for (const auto& item : m.items) this->item(item);
    w_.put_uleb(m.globals);
    w_.put_uleb(m.spoints.size());
    for (const auto& sp : m.spoints) {
      Scope s(tally_, ByteCategory::coordinates);
      coordinate(sp.src);
      w_.put_uleb(sp.tail);
    }
    tally_.flush();
    auto crc = crc32(w_.bytes());
    w_.put_u32le(crc);
    tally_.flush();
  }

 private:
  void identifier(const std::string& s) {
    Scope scope(tally_, ByteCategory::identifiers);
    w_.put_string(s);
  }

  void coordinate(const Coordinate& c) {
    Scope scope(tally_, ByteCategory::coordinates);
    identifier(c.file);
    w_.put_uleb(c.x);
    w_.put_uleb(c.y);
  }

  void item(const Item& item) {
    Scope scope(tally_, item.symbol() ? ByteCategory::symbols : ByteCategory::types);
    w_.put_uleb(tag_of(item.value));
    if (auto* s = item.symbol()) symbol(*s);
    if (auto* t = item.type()) type(*t);
    w_.put_uleb(item.uid);
  }

  void symbol(const Symbol& s) {
    w_.put_uleb(tag_of(s.node));
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, symbols::Static> || std::is_same_v<T, symbols::Global>) {
            w_.put_uleb(node.index);
          } else if constexpr (std::is_same_v<T, symbols::Local> || std::is_same_v<T, symbols::Param>) {
            w_.put_sleb(node.offset);
          } else if constexpr (std::is_same_v<T, symbols::EnumConst>) {
            w_.put_sleb(node.value);
          }
        },
        s.node);
    identifier(s.id);
    w_.put_uleb(s.uid);
    w_.put_uleb(s.module);
    coordinate(s.src);
    w_.put_uleb(s.type);
    w_.put_uleb(s.uplink);
  }

  void fields(const std::vector<Field>& fields) {
    w_.put_uleb(fields.size());
    for (const auto& f : fields) {
      identifier(f.id);
      w_.put_uleb(f.type);
      w_.put_sleb(f.offset);
      w_.put_uleb(f.bitsize);
      w_.put_uleb(f.lsb);
    }
  }

  void type(const Type& t) {
    w_.put_uleb(tag_of(t.node));
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, types::Pointer> || std::is_same_v<T, types::Const> ||
                        std::is_same_v<T, types::Volatile>) {
            w_.put_uleb(node.type);
          } else if constexpr (std::is_same_v<T, types::Enum>) {
            identifier(node.tag);
            w_.put_uleb(node.ids.size());
            for (const auto& e : node.ids) {
              identifier(e.id);
              w_.put_sleb(e.value);
            }
          } else if constexpr (std::is_same_v<T, types::Struct> || std::is_same_v<T, types::Union>) {
            identifier(node.tag);
            fields(node.fields);
          } else if constexpr (std::is_same_v<T, types::Array>) {
            w_.put_uleb(node.type);
            w_.put_uleb(node.nelems);
          } else if constexpr (std::is_same_v<T, types::Function>) {
            w_.put_uleb(node.type);
            w_.put_uleb(node.formals.size());
            for (Uid f : node.formals) w_.put_uleb(f);
          }
        },
        t.node);
    w_.put_uleb(t.size);
    w_.put_uleb(t.align);
  }

  ByteWriter& w_;
  Tally tally_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in), r_(in) {}

  Module module() {
    Module m;
    m.file = r_.get_string();
    m.uname = r_.get_uleb32();
    m.nuids = r_.get_uleb32();
    auto nitems = count();
    m.items.reserve(nitems);
    for (std::size_t i = 0; i < nitems; ++i) m.items.push_back(item());
    m.globals = r_.get_uleb32();
    auto nspoints = count();
    m.spoints.reserve(nspoints);
    for (std::size_t i = 0; i < nspoints; ++i) {
      SPoint sp;
      sp.src = coordinate();
      sp.tail = r_.get_uleb32();
      m.spoints.push_back(std::move(sp));
    }
    return m;
  }

  ByteReader& raw() { return r_; }

 private:
  // Every element occupies at least one byte, which bounds any honest count.
  std::size_t count() {
    auto n = r_.get_uleb();
    if (n > r_.remaining()) throw TruncatedInput();
    return static_cast<std::size_t>(n);
  }

  std::uint64_t tag(std::uint64_t max, const char* what) {
    auto t = r_.get_uleb();
    if (t < 1 || t > max) {
      throw SymtabError(SymtabErrc::malformed, std::string("bad ") + what + " constructor tag " + std::to_string(t));
    }
    return t;
  }

  Coordinate coordinate() {
    Coordinate c;
    c.file = r_.get_string();
    c.x = r_.get_uleb32();
    c.y = r_.get_uleb32();
    return c;
  }

  Item item() {
    auto t = tag(2, "item");
    Item item;
    if (t == 1) {
      item.value = symbol();
    } else {
      item.value = type();
    }
    item.uid = r_.get_uleb32();
    return item;
  }

  Symbol symbol() {
    Symbol s;
    switch (tag(6, "symbol")) {
      case 1: s.node = symbols::Static{r_.get_uleb32()}; break;
      case 2: s.node = symbols::Global{r_.get_uleb32()}; break;
      case 3: s.node = symbols::Typedef{}; break;
      case 4: s.node = symbols::Local{r_.get_sleb32()}; break;
      case 5: s.node = symbols::Param{r_.get_sleb32()}; break;
      case 6: s.node = symbols::EnumConst{r_.get_sleb32()}; break;
    }
    s.id = r_.get_string();
    s.uid = r_.get_uleb32();
    s.module = r_.get_uleb32();
    s.src = coordinate();
    s.type = r_.get_uleb32();
    s.uplink = r_.get_uleb32();
    return s;
  }

  std::vector<Field> fields() {
    std::vector<Field> out(count());
    for (auto& f : out) {
      f.id = r_.get_string();
      f.type = r_.get_uleb32();
      f.offset = r_.get_sleb32();
      f.bitsize = r_.get_uleb32();
      f.lsb = r_.get_uleb32();
    }
    return out;
  }

  Type type() {
    Type t;
    switch (tag(12, "type")) {
      case 1: t.node = types::Int{}; break;
      case 2: t.node = types::Unsigned{}; break;
      case 3: t.node = types::Float{}; break;
      case 4: t.node = types::Void{}; break;
      case 5: t.node = types::Pointer{r_.get_uleb32()}; break;
      case 6: {
        types::Enum e;
        e.tag = r_.get_string();
        e.ids.resize(count());
        for (auto& id : e.ids) {
          id.id = r_.get_string();
          id.value = r_.get_sleb32();
        }
        t.node = std::move(e);
        break;
      }
      case 7: {
        types::Struct s;
        s.tag = r_.get_string();
        s.fields = fields();
        t.node = std::move(s);
        break;
      }
      case 8: {
        types::Union u;
        u.tag = r_.get_string();
        u.fields = fields();
        t.node = std::move(u);
        break;
      }
      case 9: {
        types::Array a;
        a.type = r_.get_uleb32();
        a.nelems = r_.get_uleb32();
        t.node = a;
        break;
      }
      case 10: {
        types::Function f;
        f.type = r_.get_uleb32();
        f.formals.resize(count());
        for (auto& formal : f.formals) formal = r_.get_uleb32();
        t.node = std::move(f);
        break;
      }
      case 11: t.node = types::Const{r_.get_uleb32()}; break;
      case 12: t.node = types::Volatile{r_.get_uleb32()}; break;
    }
    t.size = r_.get_uleb32();
    t.align = r_.get_uleb32();
    return t;
  }

  std::span<const std::byte> in_;
  ByteReader r_;
};

}  // namespace

Bytes pickle(const Module& m, ByteAccounting* accounting) {
  ByteWriter w;
  Writer(w, accounting).module(m);
  return w.take();
}

std::size_t write_module(const Module& m, std::ostream& sink) {
  auto bytes = pickle(m);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error("failed to write symbol table for unit " + m.file);
  return bytes.size();
}

Module unpickle(std::span<const std::byte> bytes) {
  if (bytes.size() < kPickleMagic.size() ||
      !std::equal(kPickleMagic.begin(), kPickleMagic.end(), reinterpret_cast<const char*>(bytes.data()))) {
    throw SymtabError(SymtabErrc::bad_magic, "input does not start with SYMPKL1");
  }
  Module m;
  try {
    Reader reader(bytes.subspan(kPickleMagic.size()));
    m = reader.module();
    auto body_end = kPickleMagic.size() + reader.raw().position();
    auto stored = reader.raw().get_u32le();
    if (!reader.raw().at_end()) {
      throw SymtabError(SymtabErrc::trailing_data,
                        std::to_string(reader.raw().remaining()) + " byte(s) after the module");
    }
    if (crc32(bytes.first(body_end)) != stored) {
      throw SymtabError(SymtabErrc::checksum, "stored CRC-32 does not match contents");
    }
  } catch (const TruncatedInput& e) {
    throw SymtabError(SymtabErrc::truncated, e.what());
  } catch (const MalformedInput& e) {
    throw SymtabError(SymtabErrc::malformed, e.what());
  }
  validate(m);
  return m;
}

Module read_module(std::istream& source) {
  std::vector<char> raw((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  if (source.bad()) throw Error("failed to read symbol table stream");
  return unpickle(std::as_bytes(std::span<const char>(raw)));
}

std::string symfile_name(std::uint32_t uname) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x.sym", uname);
  return buf;
}

}  // namespace cdb::sym
