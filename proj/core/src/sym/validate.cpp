#include "cdb/sym/validate.hpp"

#include <set>
#include <unordered_map>


namespace cdb::sym {

namespace {

[[noreturn]] void fail(SymtabErrc code, const std::string& what) { throw SymtabError(code, what); }

class Validator {
 public:
  explicit Validator(const Module& m) : m_(m) {}

  void run() {
    index_items();
    for (const auto& item : m_.items) {
      if (auto* s = item.symbol()) check_symbol(item, *s);
      if (auto* t = item.type()) check_type(item.uid, *t);
    }
    if (m_.globals != kNoUid) {
      auto* s = symbol(m_.globals, "module globals");
      if (!s->has_address_index()) {
        fail(SymtabErrc::invariant, "globals uid " + std::to_string(m_.globals) +
                                        " does not name a STATIC or GLOBAL symbol");
      }
    }
    for (std::size_t i = 0; i < m_.spoints.size(); ++i) {
      const auto& sp = m_.spoints[i];
      if (!sp.src.is_real()) {
        fail(SymtabErrc::invariant, "stopping point " + std::to_string(i) + " has no real coordinate");
      }
      if (sp.tail != kNoUid) symbol(sp.tail, "stopping point tail");
    }
  }

 private:
  void index_items() {
    for (const auto& item : m_.items) {
      if (item.uid == kNoUid || item.uid > m_.nuids) {
        fail(SymtabErrc::invariant, "item uid " + std::to_string(item.uid) + " outside [1, " +
                                        std::to_string(m_.nuids) + "]");
      }
      if (!by_uid_.emplace(item.uid, &item).second) {
        fail(SymtabErrc::invariant, "duplicate item uid " + std::to_string(item.uid));
      }
    }
  }

  const Item* item(Uid uid, const char* what) {
    auto it = by_uid_.find(uid);
    if (it == by_uid_.end()) {
      fail(SymtabErrc::dangling_uid, std::string(what) + " references absent uid " + std::to_string(uid));
    }
    return it->second;
  }

  const Symbol* symbol(Uid uid, const char* what) {
    auto* s = item(uid, what)->symbol();
    if (!s) fail(SymtabErrc::invariant, std::string(what) + " uid " + std::to_string(uid) + " is not a symbol");
    return s;
  }

  const Type* type(Uid uid, const char* what) {
    auto* t = item(uid, what)->type();
    if (!t) fail(SymtabErrc::invariant, std::string(what) + " uid " + std::to_string(uid) + " is not a type");
    return t;
  }

  void check_symbol(const Item& item, const Symbol& s) {
    if (s.uid != item.uid) {
      fail(SymtabErrc::invariant, "symbol '" + s.id + "' uid disagrees with its item uid");
    }
    if (s.module != m_.uname) {
      fail(SymtabErrc::invariant, "symbol '" + s.id + "' belongs to another unit");
    }
    if (!s.src.is_real()) fail(SymtabErrc::invariant, "symbol '" + s.id + "' has no real coordinate");
    type(s.type, "symbol type");
    // Uplink chains must terminate within nuids steps.
    Uid at = s.uplink;
    for (std::uint32_t steps = 0; at != kNoUid; ++steps) {
      if (steps > m_.nuids) fail(SymtabErrc::invariant, "uplink cycle through '" + s.id + "'");
      at = symbol(at, "uplink")->uplink;
    }
  }

  void check_fields(const std::vector<Field>& fields, const Type& owner) {
    for (const auto& f : fields) {
      const Type* ft = type(f.type, "field type");
      if (f.bitsize == 0 && f.lsb != 0) {
        fail(SymtabErrc::invariant, "field '" + f.id + "' has lsb without bitsize");
      }
      if (f.offset < 0 || static_cast<std::uint64_t>(f.offset) + ft->size > owner.size) {
        fail(SymtabErrc::invariant, "field '" + f.id + "' lies outside its aggregate");
      }
      if (f.bitsize != 0 && f.lsb + f.bitsize > 8ull * ft->size) {
        fail(SymtabErrc::invariant, "bit field '" + f.id + "' exceeds its storage unit");
      }
    }
  }

  void check_type(Uid uid, const Type& t) {
    const std::string where = "type " + std::to_string(uid);
    if (t.align == 0) fail(SymtabErrc::invariant, where + " has zero alignment");
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, types::Void>) {
            if (t.size != 0) fail(SymtabErrc::invariant, where + ": VOID with nonzero size");
          } else if constexpr (std::is_same_v<T, types::Pointer> || std::is_same_v<T, types::Const> ||
                               std::is_same_v<T, types::Volatile>) {
            type(node.type, "referent type");
          } else if constexpr (std::is_same_v<T, types::Array>) {
            const Type* e = type(node.type, "array element type");
            if (std::uint64_t{e->size} * node.nelems != t.size) {
              fail(SymtabErrc::invariant, where + ": ARRAY size is not nelems x element size");
            }
          } else if constexpr (std::is_same_v<T, types::Function>) {
            type(node.type, "function result type");
            for (Uid f : node.formals) type(f, "formal type");
          } else if constexpr (std::is_same_v<T, types::Struct> || std::is_same_v<T, types::Union>) {
            if (t.size % t.align != 0) {
              fail(SymtabErrc::invariant, where + ": aggregate size is not a multiple of its alignment");
            }
            check_fields(node.fields, t);
          } else if constexpr (std::is_same_v<T, types::Enum>) {
            std::set<std::string> seen;
            for (const auto& e : node.ids) {
              if (!seen.insert(e.id).second) fail(SymtabErrc::invariant, where + ": duplicate enumerator " + e.id);
            }
          }
        },
        t.node);
  }

  const Module& m_;
  std::unordered_map<Uid, const Item*> by_uid_;
};

}  // namespace

void validate(const Module& m) { Validator(m).run(); }

bool is_valid(const Module& m) {
  try {
    validate(m);
    return true;
  } catch (const SymtabError&) {
    return false;
  }
}

const char* to_string(SymtabErrc code) {
  switch (code) {
    case SymtabErrc::bad_magic: return "bad magic";
    case SymtabErrc::truncated: return "truncated pickle";
    case SymtabErrc::malformed: return "malformed pickle";
    case SymtabErrc::checksum: return "checksum mismatch";
    case SymtabErrc::trailing_data: return "trailing data after pickle";
    case SymtabErrc::dangling_uid: return "dangling uid";
    case SymtabErrc::invariant: return "invariant violation";
  }
  return "symbol table error";
}

}  // namespace cdb::sym
