#include <doctest.h>

#include <algorithm>
#include <set>

#include "cdb/sym/construct.hpp"
#include "cdb/sym/query.hpp"
#include "cdb/sym/validate.hpp"
#include "symgen.hpp"
#include "testkit.hpp"

using namespace cdb;
using namespace cdb::sym;

namespace {

Module wf_module() {
  auto p = testkit::build({testkit::fixture_source("wf.c", 0x49499895), testkit::fixture_source("lookup.c", 0x494999f8)});
  return p.modules().at(0);
}

const Symbol* find_symbol(const Module& m, const std::string& id, bool (*pred)(const Symbol&)) {
  for (const auto& item : m.items)
    if (auto* s = item.symbol(); s && s->id == id && pred(*s)) return s;
  return nullptr;
}

std::vector<std::string> ids(const std::vector<const Symbol*>& chain) {
  std::vector<std::string> out;
  for (auto* s : chain) out.push_back(s->id);
  return out;
}

SymbolAttributes attrs(std::string id, Uid uid, Uid type, Uid uplink = kNoUid) {
  return {std::move(id), uid, 7, Coordinate{"t.c", 1, 1}, type, uplink};
}

}  // namespace

TEST_SUITE("symtab") {
  TEST_CASE("visible chain from c in getword") {
    Module m = wf_module();
    auto* c = find_symbol(m, "c", [](const Symbol& s) { return s.is<symbols::Local>(); });
    REQUIRE(c);
    auto chain = ids(visible_chain(m, c->uid));
    CHECK(chain == std::vector<std::string>{"c", "s", "buf", "words", "main", "tprint", "getword", "isletter"});
    REQUIRE(m.globals != kNoUid);
    SymbolIndex index(m);
    CHECK(index.symbol_at(m.globals).id == "words");
  }

  TEST_CASE("file-scope head has a one-element chain") {
    Module m = wf_module();
    auto* isletter = find_symbol(m, "isletter", [](const Symbol& s) { return s.uplink == kNoUid; });
    REQUIRE(isletter);
    CHECK(visible_chain(m, isletter->uid).size() == 1);
  }

  TEST_CASE("visible chain rejects unknown and non-symbol uids") {
    Module m = wf_module();
    CHECK_THROWS_AS(visible_chain(m, m.nuids + 5), LookupError);
    Uid type_uid = kNoUid;
    for (const auto& item : m.items)
      if (item.type()) type_uid = item.uid;
    CHECK_THROWS_AS(visible_chain(m, type_uid), LookupError);
  }

  TEST_CASE("chains are bounded and repeat-free for generated modules") {
    symgen::ModuleGenerator gen(11);
    for (int i = 0; i < 200; ++i) {
      Module m = gen.generate();
      for (const auto& item : m.items) {
        auto* s = item.symbol();
        if (!s) continue;
        auto chain = visible_chain(m, s->uid);
        CHECK(chain.size() <= m.nuids);
        std::set<Uid> seen;
        for (auto* c : chain) CHECK(seen.insert(c->uid).second);
      }
    }
  }

  TEST_CASE("lookup_name: visible chain first, then other units' globals") {
    auto p = testkit::build({testkit::fixture_source("wf.c", 0x49499895), testkit::fixture_source("lookup.c", 0x494999f8)});
    auto mods = p.modules();
    SymbolIndex wf(mods[0]), lk(mods[1]);
    std::vector<const SymbolIndex*> all{&wf, &lk};

    auto* c = find_symbol(mods[0], "c", [](const Symbol& s) { return s.is<symbols::Local>(); });
    auto buf = lookup_name("buf", wf, c->uid, all);
    REQUIRE(buf);
    CHECK(buf->symbol->is<symbols::Param>());
    CHECK(buf->module == &wf);

    auto* main_buf = find_symbol(mods[0], "buf", [](const Symbol& s) { return s.is<symbols::Local>(); });
    auto words = lookup_name("words", wf, main_buf->uid, all);
    REQUIRE(words);
    CHECK(words->symbol->is<symbols::Static>());

    auto pool = lookup_name("pool", wf, main_buf->uid, all);
    REQUIRE(pool);
    CHECK(pool->module == &lk);

    CHECK_FALSE(lookup_name("nosuch", wf, c->uid, all));
    // Locals of another unit are never reachable.
    CHECK_FALSE(lookup_name("cond", wf, c->uid, all));
  }

  TEST_CASE("find_spoints wildcards") {
    Module m = wf_module();
    // Point 17 is `s > buf`.
    const auto& p17 = m.spoints.at(17);
    auto exact = find_spoints(m, p17.src);
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].index == 17);

    // The while line of getword carries points 9 and 10.
    auto line = find_spoints(m, Coordinate{"wf.c", 0, m.spoints.at(9).src.y});
    std::vector<std::size_t> idx;
    for (auto& match : line) idx.push_back(match.index);
    CHECK(idx == std::vector<std::size_t>{9, 10});

    CHECK(find_spoints(m, Coordinate{}).size() == m.spoints.size());
    CHECK(find_spoints(m, Coordinate{"other.c", 0, 0}).empty());
    CHECK(coordinate_matches(Coordinate{"", 3, 0}, Coordinate{"x.c", 3, 9}));
    CHECK_FALSE(coordinate_matches(Coordinate{"", 3, 0}, Coordinate{"x.c", 4, 9}));
  }

  TEST_CASE("typed constructors check local invariants") {
    CHECK_THROWS_AS(make_int(4, 0), ConstructionError);
    CHECK_THROWS_AS(make_pointer(4, 4, kNoUid), ConstructionError);
    CHECK_THROWS_AS(make_struct(6, 4, "s", {}), ConstructionError);
    CHECK_THROWS_AS(make_struct(4, 4, "s", {make_field("f", 1, 0, 0, 3)}), ConstructionError);
    CHECK_THROWS_AS(make_local(attrs("", 1, 2), 0), ConstructionError);
    CHECK_THROWS_AS(make_local(attrs("x", 1, 2, 1), 0), ConstructionError);
    CHECK_NOTHROW(make_struct(4, 4, "s", {make_field("f", 1, 0, 3, 2)}));
  }

  TEST_CASE("dynamic construction covers every constructor by name") {
    using FV = FieldValue;
    std::vector<std::pair<std::string, std::vector<FV>>> type_ctors = {
        {"INT", {}},
        {"UNSIGNED", {}},
        {"FLOAT", {}},
        {"VOID", {}},
        {"POINTER", {FV{std::int64_t{1}}}},
        {"ENUM", {FV{std::string("color")}, FV{std::vector<EnumItem>{{"RED", 0}, {"GREEN", 1}}}}},
        {"STRUCT", {FV{std::string("node")}, FV{std::vector<Field>{make_field("count", 1, 0)}}}},
        {"UNION", {FV{std::string("u")}, FV{std::vector<Field>{make_field("i", 1, 0)}}}},
        {"ARRAY", {FV{std::int64_t{1}}, FV{std::int64_t{1}}}},
        {"FUNCTION", {FV{std::int64_t{1}}, FV{std::vector<Uid>{1, 1}}}},
        {"CONST", {FV{std::int64_t{1}}}},
        {"VOLATILE", {FV{std::int64_t{1}}}},
    };
    std::set<std::string> names;
    for (auto& [name, fields] : type_ctors) {
      std::uint32_t size = name == "VOID" || name == "FUNCTION" ? 0 : 4;
      Type t = construct_type(name, fields, size, name == "VOID" || name == "FUNCTION" ? 1 : 4);
      CHECK(name == constructor_name(t.node));
      names.insert(constructor_name(t.node));
    }
    CHECK(names.size() == 12);

    std::vector<std::pair<std::string, std::vector<FV>>> symbol_ctors = {
        {"STATIC", {FV{std::int64_t{0}}}}, {"GLOBAL", {FV{std::int64_t{1}}}}, {"TYPEDEF", {}},
        {"LOCAL", {FV{std::int64_t{20}}}}, {"PARAM", {FV{std::int64_t{24}}}}, {"ENUMCONST", {FV{std::int64_t{-3}}}},
    };
    for (auto& [name, fields] : symbol_ctors) {
      Symbol s = construct_symbol(name, fields, attrs("x", 2, 1));
      CHECK(name == constructor_name(s.node));
    }

    CHECK_THROWS_AS(construct_type("POINTER", {}, 4, 4), ConstructionError);
    std::vector<FV> wrong_kind{FV{std::string("x")}};
    CHECK_THROWS_AS(construct_type("POINTER", wrong_kind, 4, 4), ConstructionError);
    CHECK_THROWS_AS(construct_type("DOUBLE", {}, 8, 8), ConstructionError);
    std::vector<FV> too_big{FV{std::int64_t{1} << 40}};
    CHECK_THROWS_AS(construct_symbol("LOCAL", too_big, attrs("x", 2, 1)), ConstructionError);
  }

  TEST_CASE("validation accepts a module iff every referenced uid is defined") {
    symgen::ModuleGenerator gen(23);
    for (int i = 0; i < 200; ++i) {
      Module m = gen.generate();
      REQUIRE(is_valid(m));
      // Drop one item; validation must fail exactly when something referred to it.
      if (m.items.empty()) continue;
      std::size_t victim = i % m.items.size();
      Uid gone = m.items[victim].uid;
      Module cut = m;
      cut.items.erase(cut.items.begin() + static_cast<long>(victim));

      bool referenced = cut.globals == gone;
      auto refs_type = [&](const Type& t) {
        return std::visit(
            [&](const auto& n) -> bool {
              using T = std::decay_t<decltype(n)>;
              if constexpr (requires { n.type; }) {
                if (n.type == gone) return true;
              }
              if constexpr (std::is_same_v<T, types::Function>) {
                return std::find(n.formals.begin(), n.formals.end(), gone) != n.formals.end();
              }
              if constexpr (std::is_same_v<T, types::Struct> || std::is_same_v<T, types::Union>) {
                return std::any_of(n.fields.begin(), n.fields.end(), [&](const Field& f) { return f.type == gone; });
              }
              return false;
            },
            t.node);
      };
      for (const auto& item : cut.items) {
        if (auto* s = item.symbol()) referenced |= s->type == gone || s->uplink == gone;
        if (auto* t = item.type()) referenced |= refs_type(*t);
      }
      for (const auto& sp : cut.spoints) referenced |= sp.tail == gone;
      CHECK(is_valid(cut) == !referenced);
    }
  }

  TEST_CASE("validation rejects broken invariants") {
    Module m;
    m.file = "t.c";
    m.uname = 7;
    m.nuids = 3;
    m.items.push_back(make_item(make_int(4, 4), 1));
    m.items.push_back(make_item(make_local(attrs("a", 2, 1, 3), 20)));
    m.items.push_back(make_item(make_local(attrs("b", 3, 1, 2), 24)));
    CHECK_FALSE(is_valid(m));  // uplink cycle a <-> b

    m.items.pop_back();
    m.items[1] = make_item(make_local(attrs("a", 2, 1), 20));
    m.nuids = 2;
    CHECK(is_valid(m));
    m.globals = 2;  // a LOCAL cannot be the globals head
    CHECK_FALSE(is_valid(m));
    m.globals = kNoUid;
    m.spoints.push_back({Coordinate{"t.c", 0, 0}, 2});
    CHECK_FALSE(is_valid(m));
  }
}
